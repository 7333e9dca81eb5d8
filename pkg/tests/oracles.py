"""Independent high-precision reference values (mpmath, 40 digits).

Nothing here imports the package: generators, Kendall distributions and
orthant VaRs are rebuilt from their textbook definitions and integrated with
tanh-sinh quadrature. ``python tests/oracles.py`` regenerates
``tests/data/oracle_values.json``; the unit tests read the frozen file.
"""
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
FROZEN = Path(__file__).with_name("data") / "oracle_values.json"


def phi(fam, th, t):
    t = mp.mpf(t)
    if fam == "clayton":
        return (t ** (-th) - 1) / th
    if fam == "gumbel":
        return (-mp.log(t)) ** th
    if fam == "frank":
        return -mp.log((mp.exp(-th * t) - 1) / (mp.exp(-th) - 1))
    if fam == "amh":
        return mp.log((1 - th * (1 - t)) / t)
    return -mp.log(t)


def psi(fam, th, s):
    s = mp.mpf(s)
    if fam == "clayton":
        base = 1 + th * s
        return base ** (-1 / mp.mpf(th)) if base > 0 else mp.mpf(0)
    if fam == "gumbel":
        return mp.exp(-s ** (1 / mp.mpf(th)))
    if fam == "frank":
        return -mp.log(1 + mp.exp(-s) * (mp.exp(-th) - 1)) / th
    if fam == "amh":
        return (1 - th) / (mp.exp(s) - th)
    return mp.exp(-s)


def psi_complement(fam, th, s):
    """1 - psi(s), written so tiny s keeps full relative precision."""
    s = mp.mpf(s)
    if fam == "clayton":
        base = 1 + th * s
        return -mp.expm1(-mp.log1p(th * s) / th) if base > 0 else mp.mpf(1)
    if fam == "gumbel":
        return -mp.expm1(-s ** (1 / mp.mpf(th)))
    if fam == "frank":
        # 1 - psi = log(1 + (e^th - 1)(1 - e^-s)) / th
        return mp.log1p(mp.expm1(th) * -mp.expm1(-s)) / th
    if fam == "amh":
        return mp.expm1(s) / (mp.exp(s) - th)
    return -mp.expm1(-s)


def kendall(fam, th, d, a):
    """K(a) = sum_{i<d} (-s)^i/i! psi^(i)(s), derivatives by mpmath."""
    a = mp.mpf(a)
    s = phi(fam, th, a)
    total = mp.mpf(0)
    # differentiate in the relative coordinate r, s -> s(1 + r), so huge s keeps a sane step:
    # s^i psi^(i)(s) = d^i/dr^i psi(s(1 + r)) at r = 0
    for i in range(d):
        scaled = psi(fam, th, s) if i == 0 else mp.diff(lambda r: psi(fam, th, s * (1 + r)), 0, i, direction=1)
        total += (-1) ** i / mp.factorial(i) * scaled
    return mp.re(total)


def kendall_bivariate(fam, th, a):
    """Published bivariate Kendall formulas (Gumbel, Frank, Clayton)."""
    a = mp.mpf(a)
    if fam == "gumbel":
        return a * (1 - mp.log(a) / th)
    if fam == "frank":
        return a + (1 - mp.exp(th * a)) * mp.log((1 - mp.exp(-th * a)) / (1 - mp.exp(-th))) / th
    if fam == "clayton":
        return a * (1 + (1 - a ** th) / th)
    raise ValueError(fam)


def quantile(margin, p):
    p = mp.mpf(p)
    kind = margin[0]
    if kind == "uniform":
        return p
    if kind == "exponential":
        return -mp.log(1 - p) / margin[1]
    if kind == "pareto":
        return margin[1] * (1 - p) ** (-1 / mp.mpf(margin[2]))
    if kind == "lognormal":
        return mp.exp(margin[1] + margin[2] * mp.sqrt(2) * mp.erfinv(2 * p - 1))
    raise ValueError(kind)


def survival_quantile(margin, q):
    """quantile(1 - q) without forming 1 - q."""
    q = mp.mpf(q)
    kind = margin[0]
    if kind == "uniform":
        return 1 - q
    if kind == "exponential":
        return -mp.log(q) / margin[1]
    if kind == "pareto":
        return margin[1] * q ** (-1 / mp.mpf(margin[2]))
    if kind == "lognormal":
        return mp.exp(margin[1] + margin[2] * upper_normal_quantile(q))
    raise ValueError(kind)


def upper_normal_quantile(q):
    """z with P(Z > z) = q; deep tails solved on the log scale through erfc."""
    if q > mp.mpf("1e-20"):
        return -mp.sqrt(2) * mp.erfinv(2 * q - 1)
    target = mp.log(q)
    return mp.findroot(lambda z: mp.log(mp.erfc(z / mp.sqrt(2)) / 2) - target, mp.sqrt(-2 * target))


def orthant_var(fam, th, d, margin, a, orthant):
    """E[F^{-1}(psi(S phi(a)))] (lower) or E[Fbar^{-1}(psi(S phi(1-a)))] (upper), S ~ Beta(1, d-1)."""
    a = mp.mpf(a)
    level = a if orthant == "lower" else 1 - a
    scale = phi(fam, th, level)

    def integrand(s):
        q = psi_complement(fam, th, s * scale)
        if q <= 0:
            return mp.mpf(0)
        x = survival_quantile(margin, q) if orthant == "lower" else quantile(margin, q)
        return (d - 1) * (1 - s) ** (d - 2) * x

    return mp.quad(integrand, [0, mp.mpf("1e-6"), mp.mpf("0.01"), 1])


def tau(fam, th, d):
    e_c = mp.quad(lambda a: 1 - kendall(fam, th, d, a), [0, 0.5, 1])
    return (2 ** d * e_c - 1) / (2 ** (d - 1) - 1)


def bivariate_closed(fam, th, a):
    a = mp.mpf(a)
    if fam == "clayton":
        return th / (th - 1) * (a ** th - a) / (a ** th - 1)
    if fam == "independence":
        return (a - 1) / mp.log(a)
    if fam == "pi_sigma_pi":
        return a * mp.log(a) / (a - 1)
    if fam == "countermonotonic":
        return (1 + a) / 2
    if fam == "comonotonic":
        return a
    raise ValueError(fam)


def clayton3_closed(th, a):
    a = mp.mpf(a)
    num = (th - 1) * a ** (2 * th) + (1 - 2 * th) * a ** th + th * a
    return 2 * th * num / ((2 * th - 1) * (th - 1) * (a ** th - 1) ** 2)


def independence3(a):
    a = mp.mpf(a)
    return -2 * (1 - a + mp.log(a)) / mp.log(a) ** 2


def amh_closed(th, a):
    a = mp.mpf(a)
    g = mp.log(1 - th * (1 - a))
    return (th - 1) * g / (th * (g - mp.log(a)))


ALPHAS = ["0.1", "0.25", "0.5", "0.75", "0.9"]
FAMILIES = {"clayton": [-0.5, 0.5, 2, 10], "gumbel": [1.5, 3], "frank": [-3, 3, 8], "amh": [-0.6, 0.5, 0.9]}
MARGINS = [("uniform",), ("exponential", 1), ("pareto", 1, 3), ("lognormal", 0, 0.5)]


def build():
    out = {"kendall": [], "kendall_bivariate": [], "var": [], "tau": [], "closed": []}
    for fam, ths in FAMILIES.items():
        for th in ths:
            dims = (2, 3) if fam in ("clayton", "gumbel") or (fam == "frank" and th > 0) else (2,)
            for d in dims:
                if fam == "clayton" and d == 3 and th <= -0.5:
                    continue
                for a in ALPHAS + ["0.001", "0.999"]:
                    out["kendall"].append([fam, th, d, float(a), float(kendall(fam, th, d, a))])
            if fam != "amh":
                for a in ALPHAS:
                    out["kendall_bivariate"].append([fam, th, float(a), float(kendall_bivariate(fam, th, a))])
            out["tau"].append([fam, th, 2, float(tau(fam, th, 2))])
            for margin in MARGINS:
                for a in ALPHAS:
                    for orthant in ("lower", "upper"):
                        v = orthant_var(fam, th, 2, margin, a, orthant)
                        out["var"].append([fam, th, 2, list(margin), float(a), orthant, float(v)])
    for th in (1.0, 3.0):
        for margin in MARGINS[:2]:
            for a in ALPHAS:
                for orthant in ("lower", "upper"):
                    v = orthant_var("clayton", th, 3, margin, a, orthant)
                    out["var"].append(["clayton", th, 3, list(margin), float(a), orthant, float(v)])
    for a in ALPHAS:
        for th in (-0.5, 0.5, 2, 10):
            out["closed"].append(["clayton", th, 2, float(a), float(bivariate_closed("clayton", th, a))])
        for th in (-0.25, 1.5, 3):
            out["closed"].append(["clayton", th, 3, float(a), float(clayton3_closed(th, a))])
        for th in (-0.6, 0.5, 0.9):
            out["closed"].append(["amh", th, 2, float(a), float(amh_closed(th, a))])
        for fam in ("independence", "pi_sigma_pi", "countermonotonic", "comonotonic"):
            out["closed"].append([fam, None, 2, float(a), float(bivariate_closed(fam, None, a))])
        out["closed"].append(["independence", None, 3, float(a), float(independence3(a))])
        # removable singularities of the trivariate Clayton entry, by limit
        for th in ("1", "0.5"):
            with mp.workdps(120):
                eps = mp.mpf("1e-30")
                lim = (clayton3_closed(mp.mpf(th) + eps, a) + clayton3_closed(mp.mpf(th) - eps, a)) / 2
            out["closed"].append(["clayton", float(th), 3, float(a), float(lim)])
    return out


if __name__ == "__main__":
    FROZEN.parent.mkdir(exist_ok=True)
    FROZEN.write_text(json.dumps(build(), indent=1) + "\n")
    print(f"wrote {FROZEN}")
