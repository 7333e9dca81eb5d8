"""Fixed-size chunking with per-chunk RNG substreams.

Chunk boundaries depend only on ``n`` and ``chunk_size`` and chunk ``k``
draws from ``SeedSequence(seed, spawn_key=(k,))``, so results do not depend
on how many workers process the chunks.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_CHUNK = 1 << 16


def normalize_seed(seed):
    return int(seed) % (1 << 64)


def chunk_bounds(n, chunk_size=DEFAULT_CHUNK):
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    return [(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def chunk_rng(seed, k):
    ss = np.random.SeedSequence(normalize_seed(seed), spawn_key=(k,))
    return np.random.Generator(np.random.PCG64(ss))


def map_chunks(fn, n, seed, chunk_size=DEFAULT_CHUNK, workers=1):
    """Call ``fn(rng, size)`` once per chunk and return results in chunk order."""
    bounds = chunk_bounds(n, chunk_size)
    jobs = [(k, b - a) for k, (a, b) in enumerate(bounds)]

    def run(job):
        k, size = job
        return fn(chunk_rng(seed, k), size)

    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))
