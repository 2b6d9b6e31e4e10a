"""``caustix`` command-line front end.

Tabular results go to stdout as CSV unless ``--csv PATH`` is given;
structured results go to stdout as JSON unless ``--json PATH`` is given.
``--out PATH`` writes an SVG plot where one makes sense.  Every file is
written atomically.

Exit codes: 0 success, 1 verification failure, 2 bad arguments.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .caustics import (
    caustic_curve,
    caustic_point,
    circle_contacts,
    compress_radius,
    find_cusps,
    tangency_defect,
)
from .circle_map import DomainError, MapParams, Variant, check_radius, is_homeomorphism, iterate_jet
from .locking import rotation_interval, rotation_number, staircase, tongue_raster
from .orbits import Seed, asymptotic_orbit, bifurcation_raster
from .report import atomic_write, csv_text, json_text
from .svg import emit_scatter_svg, emit_svg
from .verify import SUITES, Status, verify


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: dict
    seed: int
    threads: int = 1
    csv: Optional[str] = None
    json: Optional[str] = None
    out: Optional[str] = None

    def header(self) -> dict:
        # threads are left out on purpose: output must not depend on them
        return {"command": self.subcommand, "seed": self.seed, **self.params}


# -- argument types -----------------------------------------------------------------


def _radius(s: str) -> float:
    try:
        return check_radius(float(s))
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _finite(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {s!r}")
    return v


def _positive_float(s: str) -> float:
    v = _finite(s)
    if v <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _count(minimum: int):
    def parse(s: str) -> int:
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}, got {v}")
        return v

    return parse


def _add_map(sp, omega: bool = True, r_default: Optional[float] = None):
    sp.add_argument("--r", type=_radius, required=r_default is None, default=r_default,
                    help="source offset 0 <= r < 1")
    if omega:
        sp.add_argument("--omega", type=_finite, default=math.pi, help="rotation offset (default pi)")
        sp.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.REFLECT.value)


def _add_common(sp, csv: bool = False, json: bool = False, svg: bool = False, threads: bool = False):
    sp.add_argument("--seed", type=_count(0), default=0, help="RNG seed, echoed in headers")
    if csv:
        sp.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
    if json:
        sp.add_argument("--json", metavar="PATH", help="write JSON here instead of stdout")
    if svg:
        sp.add_argument("--out", metavar="PATH", help="write an SVG plot")
    if threads:
        sp.add_argument("--threads", type=_count(1), default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="caustix", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"caustix {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("map-eval", help="lift value and derivatives")
    _add_map(sp)
    sp.add_argument("--iter", type=_count(1), default=1)
    sp.add_argument("--phi", type=_finite, help="single angle (default: a grid)")
    sp.add_argument("--samples", type=_count(1), default=16)
    _add_common(sp, csv=True)

    sp = sub.add_parser("orbit", help="orbit of one point")
    _add_map(sp)
    sp.add_argument("--phi", type=_finite, default=0.0, help="starting angle")
    sp.add_argument("--transient", type=_count(0), default=0)
    sp.add_argument("--keep", type=_count(1), default=100)
    _add_common(sp, csv=True)

    sp = sub.add_parser("bifurcation", help="asymptotic orbits against r")
    sp.add_argument("--r-min", type=_radius, default=0.34)
    sp.add_argument("--r-max", type=_radius, default=0.99)
    sp.add_argument("--r-steps", type=_count(1), default=200)
    sp.add_argument("--start", choices=[s.value for s in Seed], default=Seed.CRITICAL_PLUS.value)
    sp.add_argument("--phi", type=_finite, help="starting angle for --start custom")
    sp.add_argument("--transient", type=_count(0), default=1000)
    sp.add_argument("--keep", type=_count(1), default=200)
    _add_common(sp, csv=True, svg=True, threads=True)

    sp = sub.add_parser("caustic", help="sampled caustic of the n-th iterate")
    _add_map(sp)
    sp.add_argument("--iter", type=_count(1), default=1)
    sp.add_argument("--samples", type=_count(16), default=1024)
    sp.add_argument("--compress", action="store_true", help="plot on the compressed scale")
    _add_common(sp, csv=True, svg=True)

    sp = sub.add_parser("cusps", help="cusps of the caustic")
    _add_map(sp)
    sp.add_argument("--iter", type=_count(1), default=1)
    sp.add_argument("--samples", type=_count(64), default=8192, help="scan resolution")
    _add_common(sp, json=True)

    sp = sub.add_parser("tangency", help="points where the caustic meets the unit circle")
    _add_map(sp)
    sp.add_argument("--iter", type=_count(1), default=2)
    sp.add_argument("--samples", type=_count(64), default=8192, help="scan resolution")
    _add_common(sp, json=True)

    sp = sub.add_parser("tongue", help="resonance interval across r")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--q", type=_count(1), default=2)
    sp.add_argument("--r-min", type=_radius, default=0.01)
    sp.add_argument("--r-max", type=_radius, default=1.0 / 3.0)
    sp.add_argument("--r-steps", type=_count(1), default=50)
    sp.add_argument("--tol", type=_positive_float, default=1e-10)
    sp.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.REFLECT.value)
    _add_common(sp, csv=True, threads=True)

    sp = sub.add_parser("staircase", help="rotation number against omega")
    _add_map(sp, omega=False)
    sp.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.REFLECT.value)
    sp.add_argument("--samples", type=_count(1), default=512, help="number of omega values")
    sp.add_argument("--iter", type=_count(1), default=100_000)
    _add_common(sp, csv=True, threads=True)

    sp = sub.add_parser("rotation", help="rotation number of one map")
    _add_map(sp)
    sp.add_argument("--phi", type=_finite, default=0.0)
    sp.add_argument("--iter", type=_count(1), default=100_000)
    _add_common(sp, json=True)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("suite", nargs="?", choices=SUITES, default="all")
    sp.add_argument("--tol-scale", type=_positive_float, default=1.0,
                    help="multiply every tolerance (values < 1 tighten)")
    sp.add_argument("--timeout", type=_positive_float, help="per-check timeout override in seconds")
    _add_common(sp, json=True)
    ap.commands = sub.choices
    return ap


# -- output -------------------------------------------------------------------------


def _emit_csv(cfg: RunConfig, columns, rows) -> None:
    text = csv_text(columns, rows, cfg.header())
    if cfg.csv:
        atomic_write(cfg.csv, text)
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, obj) -> None:
    text = json_text(obj)
    if cfg.json:
        atomic_write(cfg.json, text)
    else:
        sys.stdout.write(text)


def _map(args) -> MapParams:
    return MapParams(args.r, args.omega, Variant(args.variant))


# -- subcommands --------------------------------------------------------------------


def cmd_map_eval(args, cfg):
    p = _map(args)
    if args.phi is not None:
        phis = np.array([args.phi])
    else:
        phis = -math.pi + 2.0 * math.pi * np.arange(1, args.samples + 1) / args.samples
    jet = iterate_jet(p, phis, args.iter)
    rows = zip(phis, *jet.coeffs())
    _emit_csv(cfg, ("phi", "f", "df", "d2f", "d3f", "d4f"), rows)


def cmd_orbit(args, cfg):
    pts = asymptotic_orbit(_map(args), args.phi, args.transient, args.transient + args.keep + 1)
    _emit_csv(cfg, ("k", "phi"), ((args.transient + 1 + k, v) for k, v in enumerate(pts)))


def cmd_bifurcation(args, cfg, parser):
    if args.r_max < args.r_min:
        parser.error("--r-max must be >= --r-min")
    if args.start == Seed.CUSTOM.value and args.phi is None:
        parser.error("--start custom needs --phi")
    if args.start != Seed.CUSTOM.value and args.r_min < 1.0 / 3.0:
        parser.error("critical starts exist only for r >= 1/3; use --start custom")
    grid = bifurcation_raster(args.r_min, args.r_max, args.r_steps, args.start,
                              args.transient, args.transient + args.keep + 1, args.phi, args.threads)
    rows = list(grid.rows())
    _emit_csv(cfg, ("r", "phi_sample"), rows)
    if cfg.out:
        xs = [row[0] for row in rows]
        ys = [row[1] for row in rows]
        atomic_write(cfg.out, emit_scatter_svg(xs, ys, (grid.x_min, grid.x_max),
                                               title=f"asymptotic orbits, {grid.semantics}"))


def cmd_caustic(args, cfg):
    p = _map(args)
    samples = caustic_curve(p, args.iter, args.samples)
    rows = [(s.phi, s.x, s.y, s.at_infinity) for s in samples]
    _emit_csv(cfg, ("phi", "x", "y", "at_infinity"), rows)
    if cfg.out:
        pts = caustic_curve(p, args.iter, args.samples, compress=args.compress)
        curve = np.array([(s.x, s.y) for s in pts])
        # close the loop
        curve = np.vstack([curve, curve[:1]])
        src = (compress_radius(p.r) if args.compress else p.r, 0.0)
        atomic_write(cfg.out, emit_svg([curve], source=src, compressed=args.compress,
                                       title=f"caustic r={p.r:g} n={args.iter}"))


def cmd_cusps(args, cfg):
    cusps = find_cusps(_map(args), args.iter, args.samples)
    _emit_json(cfg, [c.as_dict() for c in cusps])


def cmd_tangency(args, cfg):
    p = _map(args)
    out = []
    for phi in circle_contacts(p, args.iter, args.samples):
        s = caustic_point(p, args.iter, phi)
        out.append({"phi": phi, "x": s.x, "y": s.y,
                    "angle_defect": tangency_defect(p, args.iter, phi)})
    _emit_json(cfg, out)


def cmd_tongue(args, cfg, parser):
    if args.r_max < args.r_min:
        parser.error("--r-max must be >= --r-min")
    if math.gcd(args.p, args.q) != 1:
        parser.error("--p and --q must be coprime")
    if Variant(args.variant) is Variant.REFLECT and args.r_max > 1.0 / 3.0 + 1e-12:
        parser.error("resonance intervals of the reflect map need --r-max <= 1/3")
    grid = tongue_raster(args.p, args.q, args.r_min, args.r_max, args.r_steps,
                         Variant(args.variant), args.tol, args.threads)
    _emit_csv(cfg, ("r", "omega_lo", "omega_hi", "width"), grid.rows())


def cmd_staircase(args, cfg):
    samples = staircase(args.r, args.samples, args.iter, Variant(args.variant), args.threads)
    _emit_csv(cfg, ("omega", "rotation", "error_bound"),
              ((s.omega_param, s.rotation.value, s.rotation.error_bound) for s in samples))


def cmd_rotation(args, cfg):
    p = _map(args)
    est = rotation_number(p, args.phi, args.iter)
    info = {"rotation": est.value, "error_bound": est.error_bound, "iterations": est.iterations_used,
            "homeomorphism": is_homeomorphism(p), **cfg.header()}
    if not is_homeomorphism(p):
        lo, hi = rotation_interval(p, args.iter)
        info["interval"] = [lo.value, hi.value]
    if cfg.json:
        atomic_write(cfg.json, json_text(info))
    print(repr(est.value))


def cmd_verify(args, cfg):
    def progress(res):
        print(f"[{res.status.value.upper():4}] {res.name} ({res.seconds:.1f}s)", file=sys.stderr, flush=True)

    report = verify(args.suite, args.tol_scale, args.seed, args.timeout, progress)
    payload = {**report.as_dict(), "version": __version__, "tol_scale": args.tol_scale, "seed": args.seed}
    if cfg.json:
        atomic_write(cfg.json, json_text(payload))
    print(json_text(payload), end="")
    print(report.table())
    return 1 if report.status is Status.FAIL else 0


_PARAM_KEYS = ("r", "omega", "variant", "iter", "phi", "samples", "compress", "r_min", "r_max",
               "r_steps", "start", "transient", "keep", "p", "q", "tol", "suite", "tol_scale")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    params = {k: getattr(args, k) for k in _PARAM_KEYS if getattr(args, k, None) is not None}
    cfg = RunConfig(args.command, params, args.seed, getattr(args, "threads", 1),
                    getattr(args, "csv", None), getattr(args, "json", None), getattr(args, "out", None))
    sub = parser.commands[args.command]
    try:
        if args.command == "verify":
            return cmd_verify(args, cfg)
        handler = {"map-eval": cmd_map_eval, "orbit": cmd_orbit, "caustic": cmd_caustic,
                   "cusps": cmd_cusps, "tangency": cmd_tangency, "staircase": cmd_staircase,
                   "rotation": cmd_rotation}.get(args.command)
        if handler is not None:
            handler(args, cfg)
        elif args.command == "bifurcation":
            cmd_bifurcation(args, cfg, sub)
        else:
            cmd_tongue(args, cfg, sub)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DomainError, ValueError) as exc:
        sub.print_usage(sys.stderr)
        print(f"caustix {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
