"""Command-line interface: ``convexpoly <subcommand> ...``.

Structured results go to stdout (or ``--output``) as JSON, curves as CSV
with a header row.  Floats are written with 17 significant digits.  Exit
status is 0 on success, 1 on domain errors (with the stable error code on
stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import approx, cyclic, measures, peaking, polycore, series
from .errors import ConvexPolyError
from .expr import Expression

log = logging.getLogger("convexpoly")

SEED_ENV = "CONVEXPOLY_SEED"


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one invocation; logged for reproducibility."""

    command: str
    tol: float = 1e-8
    max_iter: int = 1000
    growth_threshold: float = measures.GROWTH_THRESHOLD
    verdict_threshold: float = 1e-2
    horizon: Optional[int] = None
    seed: Optional[int] = None
    degrees: tuple = ()
    grid_size: int = 512
    output: Optional[str] = None

    def __post_init__(self):
        for name in ("tol", "growth_threshold", "verdict_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


# ------------------------------------------------------------ formatting


def fmt(v) -> str:
    """17 significant digits; non-finite values as inf / -inf / nan."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits (non-finite as strings)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt(obj)
        return s if math.isfinite(float(obj)) else json.dumps(s)
    return json.dumps(str(obj))


def to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ------------------------------------------------------------ input helpers


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _interval(text: str) -> tuple:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"interval must be 'a,b', got {text!r}")
    return tuple(vals)


def _read_poly(text: str) -> polycore.ConvexPolynomial:
    """Inline JSON object, path to a JSON file, or a comma-separated coefficient list."""
    s = text.strip()
    if s.startswith("{"):
        return polycore.ConvexPolynomial.from_json(s)
    if os.path.exists(s):
        with open(s) as fh:
            return polycore.ConvexPolynomial.from_json(fh.read())
    return polycore.make_convex(_float_list(s))


def _read_measure(path: str) -> measures.Measure:
    with open(path) as fh:
        return measures.Measure.from_json(fh.read())


def _read_samples(path: str):
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not xs:
                    continue  # header
                raise ValueError(f"bad sample row {row!r}") from None
            xs.append(x)
            ys.append(y)
    return np.array(xs), np.array(ys)


def _emit(text: str, path: Optional[str]):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


# ------------------------------------------------------------ commands


def cmd_poly(args, cfg: RunConfig) -> str:
    p = _read_poly(args.p)
    if args.action == "eval":
        if not args.x:
            raise _Usage("poly eval needs --x")
        out = []
        for x in args.x:
            r = polycore.evaluate(p, x)
            out.append({"x": x, "value": r.value, "sign": r.sign, "log_magnitude": r.magnitude_log,
                        "overflowed": r.overflowed, "log_domain": r.log_domain})
        return to_json(out[0] if len(out) == 1 else out)
    if args.q is None:
        raise _Usage(f"poly {args.action} needs --q")
    q = _read_poly(args.q)
    r = polycore.multiply(p, q) if args.action == "mul" else polycore.compose(p, q)
    return to_json(r.to_dict())


def cmd_peak(args, cfg: RunConfig) -> str:
    pp = peaking.peaking_polynomial(args.a, args.x0)
    report = peaking.verify_peak(pp, grid_size=args.grid)
    if args.emit_curve:
        x, y = peaking.sample_curve(pp, args.grid)
        _write(args.emit_curve, to_csv(["x", "p"], zip(x, y)))
    return to_json({"polynomial": pp.to_dict(), "report": report.to_dict()})


def _weight(args):
    return Expression(args.weight) if args.weight else None


def cmd_moments(args, cfg: RunConfig) -> str:
    mu = _read_measure(args.measure)
    signs, logs = measures.moment_sequence(mu, _weight(args), args.max_n)
    rows = [(n, measures.exp_signed(int(s), l), int(s), l) for n, (s, l) in enumerate(zip(signs, logs))]
    return to_csv(["n", "value", "sign", "log_magnitude"], rows)


def cmd_certify(args, cfg: RunConfig) -> str:
    mu = _read_measure(args.measure)
    res = measures.growth_certificate(mu, _weight(args), args.max_n, cfg.growth_threshold)
    return to_json(res.to_dict())


def cmd_approximate(args, cfg: RunConfig) -> str:
    f = Expression(args.target)
    a, b = args.interval
    report = approx.density_probe(a, b, f, args.degrees, mode=args.mode,
                                  threshold=cfg.verdict_threshold, grid_size=cfg.grid_size,
                                  tol=cfg.tol, max_iter=cfg.max_iter)
    log.info("verdict %s (lower bound %s)", report.verdict, fmt(report.lower_bound))
    if args.report:
        _write(args.report, to_json({"target": f.text, "interval": [a, b], **report.to_dict()}) + "\n")
    if args.residual_curve:
        x = approx.chebyshev_grid(a, b, cfg.grid_size)
        p = report.results[-1].poly
        fx, px = f(x), p(x)
        _write(args.residual_curve, to_csv(["x", "f", "p", "residual"], zip(x, fx, px, px - fx)))
    rows = [(d, r.error, r.iterations, r.gap) for d, r in zip(report.degrees, report.results)]
    return to_csv(["degree", "error", "iterations", "gap"], rows)


def cmd_series(args, cfg: RunConfig) -> str:
    if args.action == "fit":
        if not args.samples or args.degree is None:
            raise _Usage("series fit needs --samples and --degree")
        x, y = _read_samples(args.samples)
        fit = series.fit_convex_series(x, y, args.degree, threshold=args.threshold)
        return to_json(fit.to_dict())
    if args.kind is None or args.truncate is None:
        raise _Usage("series needs --kind and --truncate")
    if args.kind == "exp":
        s = series.exp_series()
    else:
        if args.param is None:
            raise _Usage("--kind resolvent needs --param")
        s = series.resolvent_series(args.param)
    p = series.truncate_to_convex(s, args.truncate)
    return to_json({**p.to_dict(), "kind": args.kind, "param": args.param, "degree": args.truncate,
                    "tail_bound": s.tail_bound(args.truncate)})


def cmd_cyclic(args, cfg: RunConfig) -> str:
    mu = _read_measure(args.measure)
    f = Expression(args.vector)
    verdict = cyclic.odd_power_test(f, mu, args.power, args.max_n, args.trials, cfg.seed,
                                    cfg.growth_threshold)
    return to_json(verdict.to_dict())


def cmd_invariant_set(args, cfg: RunConfig) -> str:
    mu = _read_measure(args.measure)
    rep = cyclic.invariant_set_probe(mu, args.set, samples=args.samples, seed=cfg.seed)
    return to_json(rep.to_dict())


class _Usage(Exception):
    pass


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convexpoly",
                                     description="Approximation by polynomials with coefficients on the simplex.")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("-o", "--output", help="write the result here instead of stdout")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--max-iter", type=int, default=1000)
        p.add_argument("--growth-threshold", type=float, default=measures.GROWTH_THRESHOLD)
        if seed:
            p.add_argument("--seed", type=int, default=0, help=f"overridden by ${SEED_ENV}")
        return p

    p = common(sub.add_parser("poly", help="evaluate, multiply or compose convex-polynomials"))
    p.add_argument("action", choices=["eval", "mul", "compose"])
    p.add_argument("--p", required=True, help="JSON object, JSON file or comma-separated coefficients")
    p.add_argument("--q")
    p.add_argument("--x", type=float, action="append")
    p.set_defaults(run=cmd_poly)

    p = common(sub.add_parser("peak", help="build and verify a peaking polynomial"))
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--grid", type=int, default=10_001)
    p.add_argument("--emit-curve", metavar="CSV")
    p.set_defaults(run=cmd_peak)

    for name, fn, helptext in (("moments", cmd_moments, "moment table of a measure"),
                               ("certify", cmd_certify, "moment growth certificate")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--measure", required=True, metavar="JSON")
        p.add_argument("--max-n", type=int, default=60)
        p.add_argument("--weight", metavar="EXPR")
        p.set_defaults(run=fn)

    p = common(sub.add_parser("approximate", help="error curve of best approximation"))
    p.add_argument("--target", required=True, metavar="EXPR")
    p.add_argument("--interval", type=_interval, required=True, metavar="A,B")
    p.add_argument("--mode", choices=["l2", "uniform"], default="uniform")
    p.add_argument("--degrees", type=_int_list, required=True, metavar="N1,N2,...")
    p.add_argument("--grid-size", type=int, default=512)
    p.add_argument("--threshold", type=float, default=1e-2, help="Dense-consistent ratio")
    p.add_argument("--report", metavar="JSON", help="write verdict and curve here")
    p.add_argument("--residual-curve", metavar="CSV")
    p.set_defaults(run=cmd_approximate)

    p = common(sub.add_parser("series", help="truncate or fit convex-power series"))
    p.add_argument("action", nargs="?", choices=["fit"])
    p.add_argument("--kind", choices=["exp", "resolvent"])
    p.add_argument("--param", type=float)
    p.add_argument("--truncate", type=int)
    p.add_argument("--samples", metavar="CSV")
    p.add_argument("--degree", type=int)
    p.add_argument("--threshold", type=float)
    p.set_defaults(run=cmd_series)

    p = common(sub.add_parser("cyclic", help="convex-cyclicity test"), seed=True)
    p.add_argument("--measure", required=True, metavar="JSON")
    p.add_argument("--vector", default="1", metavar="EXPR")
    p.add_argument("--max-n", type=int, default=100)
    p.add_argument("--trials", type=int, default=32)
    p.add_argument("--power", type=int, default=1)
    p.set_defaults(run=cmd_cyclic)

    p = common(sub.add_parser("invariant-set", help="probe the invariant convex sets A and B"), seed=True)
    p.add_argument("--measure", required=True, metavar="JSON")
    p.add_argument("--set", required=True, choices=["A", "B"])
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(run=cmd_invariant_set)
    return parser


def _join_negative_values(argv: Sequence[str]) -> list:
    """``--interval -3,-1.5`` -> ``--interval=-3,-1.5`` so argparse does not read an option."""
    out = []
    for tok in argv:
        prev = out[-1] if out else ""
        if (len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")
                and prev.startswith("--") and "=" not in prev):
            out[-1] = f"{prev}={tok}"
        else:
            out.append(tok)
    return out


def resolve_config(args) -> RunConfig:
    seed = getattr(args, "seed", None)
    env = os.environ.get(SEED_ENV)
    if env is not None and seed is not None:
        seed = int(env)
    return RunConfig(
        command=args.command,
        tol=args.tol,
        max_iter=args.max_iter,
        growth_threshold=args.growth_threshold,
        verdict_threshold=getattr(args, "threshold", None) or 1e-2,
        horizon=getattr(args, "max_n", None),
        seed=seed,
        degrees=tuple(getattr(args, "degrees", ()) or ()),
        grid_size=getattr(args, "grid_size", 512),
        output=args.output,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"convexpoly: error: {exc}", file=sys.stderr)
        return 2
    print(f"convexpoly: config {json.dumps(asdict(cfg), sort_keys=True)}", file=sys.stderr)
    try:
        text = args.run(args, cfg)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"convexpoly: error: {exc}", file=sys.stderr)
        return 2
    except ConvexPolyError as exc:
        print(f"convexpoly: error {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"convexpoly: error: {exc}", file=sys.stderr)
        return 1
    _emit(text, cfg.output)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
