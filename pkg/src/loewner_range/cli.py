"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure or invalid point,
3 an Outside verdict or a failed verification.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import SolverConfig
from .errors import LoewnerRangeError
from .loewner import (
    Driver, ExtremalInit, free_time_x0, integrate_inverse, integrate_radial, random_driver,
)
from .regions import (
    CurvePoint, Verdict, build_free_preimage_region, build_preimage_region,
    build_value_region, chebyshev_grid, contains, sample_curve,
)
from .scalar import (
    BranchDirection, FORWARD_PLUS, INVERSE_PLUS, ProblemParams, Sign,
    sigma_forward, solve_radius_forward, solve_radius_inverse,
)
from . import verify as vh

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_FAIL = 0, 1, 2, 3
SEED_ENV = "LOEWNER_RANGE_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the exit contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_time(text: str) -> float:
    """Decimal literal or ``ln:X`` for the natural logarithm of X."""
    try:
        if text.startswith("ln:"):
            value = math.log(float(text[3:]))
        else:
            value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a time: {text!r}") from exc
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"time must be finite and >= 0: {text!r}")
    return value


def parse_point(text: str) -> complex:
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from exc
    return complex(re_, im_)


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    return int(env) if env not in (None, "") else SolverConfig.seed


def _config(args) -> SolverConfig:
    return SolverConfig(tol_root=args.tol_root, n_curve=args.n_curve,
                        boundary_tol=args.boundary_tol, h_max=args.h_max,
                        blowup_eps=args.blowup_eps, seed=args.seed)


def _common(parser):
    d = SolverConfig()
    g = parser.add_argument_group("solver configuration")
    g.add_argument("--tol-root", type=float, default=d.tol_root)
    g.add_argument("--n-curve", type=int, default=d.n_curve)
    g.add_argument("--boundary-tol", type=float, default=d.boundary_tol)
    g.add_argument("--h-max", type=float, default=d.h_max)
    g.add_argument("--blowup-eps", type=float, default=d.blowup_eps)
    g.add_argument("--seed", type=int, default=_default_seed())


def _family_region(family, z0, T, cfg):
    if family == "wfree":
        return build_free_preimage_region(z0, cfg)
    if T is None:
        raise UsageError(f"--T is required for family {family}")
    p = ProblemParams(z0, T)
    return build_value_region(p, cfg) if family == "v" else build_preimage_region(p, cfg)


# --- region -------------------------------------------------------------------

def _curve_samples(family, z0, T, n, cfg):
    if family == "wfree":
        s = chebyshev_grid(n, 0.0, math.pi)
        r = np.tanh(np.arctanh(z0) + 0.5 * s)
        x0 = free_time_x0(z0)
        return [CurvePoint(x0, float(ri), float(si), complex(ri * np.exp(1j * si)))
                for ri, si in zip(r, s)]
    d = FORWARD_PLUS if family == "v" else INVERSE_PLUS
    return sample_curve(ProblemParams(z0, T), d, n, cfg)


def _marker_points(reg, family, cfg):
    """Positions of the labelled x0 markers, for the SVG only."""
    if family == "wfree" or reg.T is None:
        return {}
    p = reg.params
    solve = solve_radius_forward if family == "v" else solve_radius_inverse
    out = {}
    for name in ("chi", "aleph"):
        if name in reg.markers:
            out[io.svg_label(name)] = complex(-solve(p, reg.markers[name], cfg), 0.0)
    if "x_star" in reg.markers:
        x = reg.markers["x_star"]
        out[io.svg_label("x_star")] = complex(solve(p, x, cfg) * np.exp(1j * sigma_forward(p, x, cfg)))
    return out


def cmd_region(args) -> int:
    cfg = _config(args)
    if args.n is not None:
        cfg = cfg.replace(n_curve=args.n)
    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = formats - {"csv", "json", "svg"}
    if unknown:
        raise UsageError(f"unknown format(s): {', '.join(sorted(unknown))}")
    reg = _family_region(args.family, args.z0, args.T, cfg)
    prefix = Path(args.out)
    if "csv" in formats:
        pts = _curve_samples(args.family, args.z0, args.T, cfg.n_curve, cfg)
        io.atomic_write(prefix.with_name(prefix.name + ".csv"), io.curve_csv(pts))
    if "json" in formats:
        io.atomic_write(prefix.with_name(prefix.name + ".json"), io.dumps(io.region_document(reg)))
    if "svg" in formats:
        svg = io.region_svg(reg, _marker_points(reg, args.family, cfg))
        io.atomic_write(prefix.with_name(prefix.name + ".svg"), svg)
    print(json.dumps({"case": reg.case.value, "out": str(prefix)}))
    return EXIT_OK


# --- member -------------------------------------------------------------------

def cmd_member(args) -> int:
    cfg = _config(args)
    if not abs(args.point) < 1.0:
        print(f"error: point {args.point} is not inside the unit disc", file=sys.stderr)
        return EXIT_NUMERIC
    reg = _family_region(args.family, args.z0, args.T, cfg)
    m = contains(reg, args.point, cfg.boundary_tol)
    print(json.dumps({"verdict": m.verdict.value, "margin": m.margin}))
    return EXIT_FAIL if m.verdict is Verdict.OUTSIDE else EXIT_OK


# --- simulate -----------------------------------------------------------------

def parse_driver(spec: str, T: float, seed: int) -> Driver:
    kind, _, arg = spec.partition(":")
    try:
        if kind == "const":
            return Driver.constant(float(arg))
        if kind == "random":
            return random_driver(seed, int(arg), T)
        if kind == "file":
            return Driver.from_dict(json.loads(Path(arg).read_text()))
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(f"bad driver {spec!r}: {exc}") from exc
    raise UsageError(f"driver must be const:THETA, random:N or file:PATH, got {spec!r}")


def cmd_simulate(args) -> int:
    cfg = _config(args)
    drv = parse_driver(args.driver, args.T, args.seed)
    run = integrate_radial if args.direction == "fwd" else integrate_inverse
    tr = run(args.z0, drv, args.T, cfg)
    prefix = Path(args.out)
    io.atomic_write(prefix.with_name(prefix.name + ".csv"), io.trajectory_csv(tr))
    sidecar = {"direction": args.direction, "z0": args.z0, "T": args.T,
               "driver": drv.to_dict(), "blow_up": tr.blow_up}
    io.atomic_write(prefix.with_name(prefix.name + ".json"), io.dumps(sidecar))
    w = tr.endpoint
    print(json.dumps({"t": float(tr.times[-1]), "re": w.real, "im": w.imag, "blow_up": tr.blow_up}))
    return EXIT_OK


# --- verify -------------------------------------------------------------------

def _direction(args) -> BranchDirection:
    return FORWARD_PLUS if args.direction == "fwd" else INVERSE_PLUS


def random_inits(seed: int, count: int) -> list:
    """``count`` extremal initial costates with uniform random beta."""
    rng = np.random.default_rng(seed)
    out = []
    for beta in rng.uniform(0.0, 2 * math.pi, count):
        branch = Sign.PLUS if math.sin(beta) <= 0 else Sign.MINUS
        out.append(ExtremalInit(math.cos(beta), float(beta), branch))
    return out


def run_suite(name: str, args, cfg: SolverConfig):
    p = ProblemParams(args.z0, args.T)
    d = _direction(args)
    if name == "inclusion":
        return vh.check_inclusion(p, args.trials, args.seed, d, cfg=cfg)
    if name == "extremal":
        return vh.check_extremal_consistency(p, chebyshev_grid(args.nodes), d, cfg)
    if name == "hamiltonian":
        if args.beta is not None:
            b = args.beta % (2 * math.pi)
            inits = [ExtremalInit(math.cos(b), b, Sign.PLUS if math.sin(b) <= 0 else Sign.MINUS)]
        else:
            inits = random_inits(args.seed, args.extremals)
        reports = [vh.check_hamiltonian_constancy(p, i, BranchDirection(d.direction, i.branch), cfg)
                   for i in inits]
        return vh.merge_reports("hamiltonian", reports)
    if name == "duality":
        return vh.check_duality(args.z0, args.T, cfg)
    if name == "freetime":
        return vh.check_free_time(args.z0, np.arange(1, 31) / 10.0, cfg)
    raise UsageError(f"unknown suite {name!r}")


SUITES = ("inclusion", "extremal", "hamiltonian", "duality", "freetime")


def cmd_verify(args) -> int:
    cfg = _config(args)
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [run_suite(n, args, cfg) for n in names]
    docs = [r.to_dict(timing=not args.no_timing) for r in reports]
    text = io.dumps(docs if args.suite == "all" else docs[0])
    if args.out:
        io.atomic_write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loewner-range", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("region", help="compute a region and write CSV/JSON/SVG")
    p.add_argument("--family", choices=("v", "w", "wfree"), required=True)
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--T", type=parse_time)
    p.add_argument("--out", default="region")
    p.add_argument("--format", default="csv,json,svg")
    p.add_argument("--n", type=int, help="number of curve samples in the CSV")
    _common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("member", help="classify a point against a region")
    p.add_argument("--family", choices=("v", "w", "wfree"), required=True)
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--T", type=parse_time)
    p.add_argument("--point", type=parse_point, required=True)
    _common(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("simulate", help="integrate the Loewner equation for a driver")
    p.add_argument("--direction", choices=("fwd", "inv"), required=True)
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--T", type=parse_time, required=True)
    p.add_argument("--driver", required=True)
    p.add_argument("--out", default="trajectory")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--z0", type=float, default=0.65)
    p.add_argument("--T", type=parse_time, default=1.2)
    p.add_argument("--direction", choices=("fwd", "inv"), default="fwd")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--nodes", type=int, default=21)
    p.add_argument("--extremals", type=int, default=20)
    p.add_argument("--beta", type=float, help="initial costate angle, taken mod 2pi")
    p.add_argument("--out")
    p.add_argument("--no-timing", action="store_true", help="omit elapsed_ms for byte-stable output")
    _common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _glue_values(argv):
    """Attach values such as ``-0.5,0`` to their flag so argparse does not
    mistake them for options."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--point", "--beta", "--z0"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LoewnerRangeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
