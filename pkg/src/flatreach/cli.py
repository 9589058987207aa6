"""``flatreach`` command-line interface.

Exit codes: 0 success (verify: pass or vacuous), 2 verify failed,
3 bad input (unreadable or malformed file, invalid argument), 4 internal error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .exceptions import DomainError, FormatError, ParameterError, ParseError, ResolutionError

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _num(v: float) -> str:
    return f"{v:.12g}"


def cmd_bound(args) -> int:
    import time

    from .bound import build_construction, optimize_c

    t0 = time.perf_counter()
    c_hat, theta = optimize_c(args.tol)
    elapsed = time.perf_counter() - t0
    if not args.lam > 0:
        raise ParameterError("lambda must be positive")
    print(f"c_hat {_num(c_hat)}")
    print(f"theta_star {_num(theta)}")
    print(f"threshold {_num(c_hat / args.lam)}")
    if args.timing:
        print(f"seconds {elapsed:.6f}")
    if args.plot:
        import math

        from .svg import emit_svg

        rho = args.rho if args.rho is not None else 0.5 * c_hat / args.lam
        x = math.cos(theta) / args.lam
        emit_svg(args.plot, construction=build_construction(args.lam, rho, x))
    return EXIT_OK


def _load_any(path):
    from .pipeline import load_shape

    kind = "polygon_json" if str(path).lower().endswith(".json") else "mask_pgm"
    return load_shape(path, kind)


def cmd_minimize(args) -> int:
    from .flatnorm import minimize_l1tv
    from .geometry import ClosedCurve
    from .io import write_pgm
    from .shapes import rasterize

    shape = _load_any(args.input)
    if isinstance(shape, ClosedCurve):
        shape = rasterize(shape, args.spacing or shape.extent / 256)
    r = minimize_l1tv(shape, args.lam, args.stencil)
    write_pgm(args.out, r.sigma)
    print(f"perimeter {_num(r.perimeter)}")
    print(f"symdiff_area {_num(r.symdiff_area)}")
    print(f"energy {_num(r.energy)}")
    print(f"cut_energy {_num(r.cut_energy)}")
    return EXIT_OK


def cmd_reach(args) -> int:
    from .flatnorm import extract_boundary
    from .geometry import ClosedCurve, resample_arclength
    from .reach import reach_bruteforce, reach_federer

    shape = _load_any(args.input)
    curves = [shape] if isinstance(shape, ClosedCurve) else extract_boundary(shape)
    if not curves:
        raise DomainError("input has no boundary")
    step = min(c.perimeter for c in curves) / 400
    curves = [resample_arclength(c, min(step, c.perimeter / 16)) for c in curves]
    grid = args.grid_step or step
    if args.method in ("federer", "both"):
        e = reach_federer(curves)
        print(f"federer {_num(e.value)} {e.kind}")
    if args.method in ("bruteforce", "both"):
        e = reach_bruteforce(curves, grid)
        print(f"bruteforce {_num(e.value)} {e.kind}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .pipeline import PipelineConfig, run_verify

    cfg = PipelineConfig(
        input_path=args.input,
        lam=args.lam,
        stencil=args.stencil,
        smoothing_passes=args.smoothing,
        reach_method=args.method,
        output_report=args.report,
        output_svg=args.svg,
        seed=args.seed,
        spacing=args.spacing,
    )
    report = run_verify(cfg)
    print(f"overall {report.overall}")
    return EXIT_FAIL if report.overall == "fail" else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flatreach", description="Flat norm minimizers, reach and the C_hat/lambda bound.")
    p.add_argument("--version", action="version", version=f"flatreach {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="optimize C(theta) and print c_hat, theta_star, threshold")
    b.add_argument("--lambda", dest="lam", type=float, default=1.0)
    b.add_argument("--tol", type=float, default=1e-10)
    b.add_argument("--plot", metavar="PATH", help="SVG of the construction regions at theta_star")
    b.add_argument("--rho", type=float, help="bottleneck half-width for --plot (default threshold/2)")
    b.add_argument("--timing", action="store_true", help="also print the optimization time")
    b.set_defaults(func=cmd_bound)

    m = sub.add_parser("minimize", help="L1TV minimizer of a mask, written as PGM")
    m.add_argument("--input", required=True)
    m.add_argument("--lambda", dest="lam", type=float, required=True)
    m.add_argument("--stencil", type=int, choices=(4, 8, 16), default=16)
    m.add_argument("--spacing", type=float, help="pixel size for polygon inputs")
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_minimize)

    r = sub.add_parser("reach", help="reach of a polygon or of a mask's boundary")
    r.add_argument("--input", required=True)
    r.add_argument("--method", choices=("federer", "bruteforce", "both"), default="federer")
    r.add_argument("--grid-step", type=float)
    r.set_defaults(func=cmd_reach)

    v = sub.add_parser("verify", help="check curvature and reach bounds on the minimizer")
    v.add_argument("--input", required=True)
    v.add_argument("--lambda", dest="lam", type=float, required=True)
    v.add_argument("--report", required=True)
    v.add_argument("--svg")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--stencil", type=int, choices=(4, 8, 16), default=16)
    v.add_argument("--smoothing", type=int, default=2)
    v.add_argument("--method", choices=("federer", "bruteforce", "both"), default="federer")
    v.add_argument("--spacing", type=float, help="pixel size for polygon inputs")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FormatError, ParameterError, DomainError, ResolutionError, OSError) as err:
        print(f"flatreach: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as err:  # noqa: BLE001
        print(f"flatreach: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
