"""Command-line front end.

Subcommands::

    orthantvar var     --copula clayton:2:2 --alpha 0.5 --method closed
    orthantvar curve   --copula clayton:2:2 --thetas -0.5,0,2,10 --alpha 0.01:0.99:0.01
    orthantvar kendall --copula gumbel:2:2 --thetas 1,2,5 --alpha 0.05:0.95:0.05
    orthantvar sample  --copula frank:3:3 --n 1000 --seed 7
    orthantvar verify  --format json

CSV goes to stdout (or ``--out``) with LF line endings and numbers printed
to 9 significant digits. Exit status is 2 for configuration errors, 3 for
numerical failures and 1 when ``verify`` reports a failed check.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from .copula import CopulaModel, parse_copula, sample_copula
from .errors import ConfigError, NumericalError, ParameterRangeError
from .kendall import kendall_cdf
from .margins import parse_margins
from .riskmeasure import DEFAULT_H, DEFAULT_N, DEFAULT_NODES, METHODS, ORTHANTS, Portfolio, orthant_var
from .suite import CHECKS, DEFAULT_SEED, SuiteConfig, run_suite

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def fmt(x) -> str:
    return f"{float(x):.9g}"


def parse_alpha_grid(text: str) -> List[float]:
    """``0.5`` or ``start:stop:step`` (stop included); every value strictly inside (0, 1)."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ParameterRangeError(f"malformed alpha {text!r}; expected a number or start:stop:step") from None
    if len(nums) == 1:
        grid = nums
    elif len(nums) == 3:
        start, stop, step = nums
        if not step > 0.0:
            raise ParameterRangeError(f"alpha grid step must be positive, got {step:g}")
        if stop < start:
            raise ParameterRangeError("alpha grid stop must not be below start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [round(start + i * step, 12) for i in range(count)]
    else:
        raise ParameterRangeError(f"malformed alpha {text!r}; expected a number or start:stop:step")
    bad = [a for a in grid if not 0.0 < a < 1.0]
    if bad:
        raise ParameterRangeError(f"alpha must lie strictly inside (0, 1), got {fmt(bad[0])}")
    return grid


def parse_thetas(text: Optional[str], model: CopulaModel) -> List[Optional[float]]:
    if text is None:
        return [model.theta]
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParameterRangeError(f"malformed theta list {text!r}") from None


def _survival_flag(args) -> bool:
    if args.role == "auto":
        return args.orthant == "upper"
    return args.role == "survival"


def _portfolio(args, model: CopulaModel) -> Portfolio:
    margins = parse_margins(args.margins, model.d) if args.margins else ()
    return Portfolio(model, tuple(margins), _survival_flag(args))


def _var_rows(args, portfolio, alpha, extra=()):
    v = orthant_var(portfolio, alpha, args.orthant, args.method, nodes=args.nodes, n=args.n, h=args.h,
                    seed=args.seed, workers=args.workers)
    rows = []
    for i, value in enumerate(v.components):
        se = "" if v.stderr is None else fmt(v.stderr[i])
        rows.append([fmt(alpha), *extra, v.orthant, v.method, str(i + 1), fmt(value), se])
    return rows


def cmd_var(args) -> tuple:
    model = parse_copula(args.copula)
    portfolio = _portfolio(args, model)
    rows = []
    for alpha in parse_alpha_grid(args.alpha):
        rows.extend(_var_rows(args, portfolio, alpha))
    return ["alpha", "orthant", "method", "component", "value", "stderr"], rows


def cmd_curve(args) -> tuple:
    base = parse_copula(args.copula)
    thetas = parse_thetas(args.thetas, base)
    grid = parse_alpha_grid(args.alpha)
    rows = []
    for theta in thetas:
        model = CopulaModel(base.family, base.d, theta)
        portfolio = _portfolio(args, model)
        label = "" if theta is None else fmt(theta)
        for alpha in grid:
            rows.extend(_var_rows(args, portfolio, alpha, extra=(label,)))
    return ["alpha", "theta", "orthant", "method", "component", "value", "stderr"], rows


def cmd_kendall(args) -> tuple:
    base = parse_copula(args.copula)
    thetas = parse_thetas(args.thetas, base)
    grid = np.asarray(parse_alpha_grid(args.alpha))
    rows = []
    for theta in thetas:
        model = CopulaModel(base.family, base.d, theta)
        k = kendall_cdf(model, grid)
        label = "" if theta is None else fmt(theta)
        rows.extend([fmt(a), label, fmt(v)] for a, v in zip(grid, k))
    return ["alpha", "theta", "K"], rows


def cmd_sample(args) -> tuple:
    model = parse_copula(args.copula)
    sample = sample_copula(model, args.n, args.seed, workers=args.workers)
    values = sample.values
    prefix = "u"
    if args.margins:
        margins = parse_margins(args.margins, model.d)
        values = np.column_stack([m.quantile(values[:, j]) for j, m in enumerate(margins)])
        prefix = "x"
    header = [f"{prefix}{j + 1}" for j in range(model.d)]
    return header, [[fmt(v) for v in row] for row in values]


def cmd_verify(args) -> str:
    checks = None
    if args.checks:
        checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    cfg = SuiteConfig(checks=checks, alpha_points=args.alpha_points, invert_theta=args.invert_theta,
                      seed=args.seed, mc_n=args.mc_n, workers=args.workers)
    report = run_suite(cfg)
    text = report.to_json() if args.format == "json" else report.to_text()
    return text, report.passed


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthantvar",
                                     description="Multivariate orthant Value-at-Risk for Archimedean copulas")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, alpha_default):
        p.add_argument("--copula", required=True, help="family:theta:dim, or family:dim without a parameter")
        p.add_argument("--alpha", default=alpha_default, help="risk level or start:stop:step grid")
        p.add_argument("--out", help="write CSV to this path instead of stdout")
        p.add_argument("--workers", type=_positive_int, default=1)

    def measure(p):
        p.add_argument("--margins", help="comma-separated margin specs (uniform, exp:RATE, lognorm:MU:SIGMA, "
                                         "pareto:SCALE:SHAPE); one spec is repeated for every component")
        p.add_argument("--orthant", choices=ORTHANTS, default="lower")
        p.add_argument("--method", choices=METHODS, default="quadrature")
        p.add_argument("--role", choices=("auto", "copula", "survival"), default="auto",
                       help="whether the model is the copula or the survival copula of the portfolio "
                            "(auto: copula for lower, survival copula for upper)")
        p.add_argument("--n", type=_positive_int, default=DEFAULT_N, help="Monte Carlo sample size")
        p.add_argument("--h", type=float, default=DEFAULT_H, help="Monte Carlo band width")
        p.add_argument("--nodes", type=_positive_int, default=DEFAULT_NODES, help="initial quadrature nodes")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("var", help="orthant VaR at one or more risk levels")
    common(p, None)
    measure(p)
    p.set_defaults(func=cmd_var, kind="csv")

    p = sub.add_parser("curve", help="orthant VaR curves over an alpha grid and theta list")
    common(p, "0.01:0.99:0.01")
    measure(p)
    p.add_argument("--thetas", help="comma-separated theta values overriding the copula spec")
    p.set_defaults(func=cmd_curve, kind="csv")

    p = sub.add_parser("kendall", help="Kendall distribution curves")
    common(p, "0.01:0.99:0.01")
    p.add_argument("--thetas", help="comma-separated theta values overriding the copula spec")
    p.set_defaults(func=cmd_kendall, kind="csv")

    p = sub.add_parser("sample", help="draw from a copula (or a portfolio with --margins)")
    p.add_argument("--copula", required=True)
    p.add_argument("--margins")
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_sample, kind="csv")

    p = sub.add_parser("verify", help="run the property-verification suite")
    p.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--alpha-points", type=_positive_int, default=99)
    p.add_argument("--mc-n", type=_positive_int, default=100_000)
    p.add_argument("--invert-theta", action="store_true", help="negative control for the dependence check")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_verify, kind="report")
    return parser


_VALUE_FLAGS = ("--thetas", "--alpha", "--seed", "--copula")


def _glue_negative_values(argv):
    """Let ``--thetas -0.5,2`` through argparse, which would read ``-0.5,2`` as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_glue_negative_values(argv))
    if getattr(args, "alpha", "") is None:
        parser.error("--alpha is required")
    try:
        if args.kind == "report":
            text, ok = args.func(args)
            _emit(text, args.out)
            return EXIT_OK if ok else EXIT_FAILED
        header, rows = args.func(args)
        _emit(render_csv(header, rows), args.out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
