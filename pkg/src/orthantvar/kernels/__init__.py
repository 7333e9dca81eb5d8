"""Hot inner loops, dispatched to numba when available.

Set ``ORTHANTVAR_DISABLE_NUMBA=1`` before import to force the pure-numpy
path. ``BACKEND`` names the active implementation; ``backend(name)`` returns
either implementation module explicitly (tests and benchmarks use it).

With numba active, the single-pass kernels that fuse work numpy would spread
over several array passes (``band_stats``, ``radial_transform``) run compiled.
The pure elementwise maps stay on numpy, whose SIMD ``exp``/``log`` loops beat
scalar compiled code unless numba has SVML; see benchmarks/bench_kernels.py.
"""
import importlib
import os

from .codes import AMH, CLAYTON, FRANK, GUMBEL, INDEPENDENCE, ONE_MINUS, TINY

ENV_FLAG = "ORTHANTVAR_DISABLE_NUMBA"


def _numba_disabled():
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


def backend(name):
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    return importlib.import_module(f"{__name__}._{name}")


def _svml_enabled():
    try:
        from numba import config
    except ImportError:
        return False
    return bool(getattr(config, "USING_SVML", False))


if _numba_disabled():
    _impl = backend("numpy")
    BACKEND = "numpy"
else:
    try:
        _impl = backend("numba")
        BACKEND = "numba"
    except ImportError:
        _impl = backend("numpy")
        BACKEND = "numpy"

_numpy = backend("numpy")
_maps = _impl if _impl is _numpy or _svml_enabled() else _numpy

generator = _maps.generator
generator_inverse = _maps.generator_inverse
archimedean_cdf = _maps.archimedean_cdf
radial_transform = _impl.radial_transform
band_stats = _impl.band_stats

__all__ = [
    "AMH", "BACKEND", "CLAYTON", "ENV_FLAG", "FRANK", "GUMBEL", "INDEPENDENCE",
    "ONE_MINUS", "TINY", "archimedean_cdf", "backend", "band_stats",
    "generator", "generator_inverse", "radial_transform",
]
