"""Command-line front end: register scans, evaluate results, generate benchmarks.

Exit codes: 0 success, 1 usage or parameter error, 2 I/O or file-format
error, 3 numerical registration failure. Report paths (--trace, --report)
get a rendered PNG figure next to the CSV.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import plots
from .geometry import RigidTransform
from .io import (
    FileFormatError,
    downsample_uniform,
    load_ply_ascii,
    load_transforms,
    load_xyz,
    save_transforms,
)
from .metrics import error_report, write_report_csv
from .registration import RegistrationConfig, RegistrationError, RegistrationState, register
from .synthetic import make_scene, write_scene

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors by default; this CLI reserves 2
    # for I/O failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_scan(path: Path):
    if path.suffix.lower() == ".ply":
        return load_ply_ascii(path)
    return load_xyz(path)


def _write_trace_csv(state: RegistrationState, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "log_likelihood", "valid_clusters", "max_step_norm"])
        for record in state.records:
            writer.writerow(
                [
                    record.iteration,
                    f"{record.log_likelihood:.12g}",
                    record.valid_clusters,
                    f"{max(record.step_norms):.12g}",
                ]
            )


def cmd_register(args) -> int:
    if len(args.input) < 2:
        print("error: need at least two --input scans", file=sys.stderr)
        return EXIT_USAGE
    scans = []
    for path in args.input:
        path = Path(path)
        scans.append(downsample_uniform(_load_scan(path), args.downsample))
    if args.init is not None:
        if not Path(args.init).exists():
            print(f"error: initial-transform file not found: {args.init}", file=sys.stderr)
            return EXIT_IO
        initial = load_transforms(args.init, expected=len(scans))
    else:
        initial = [RigidTransform.identity() for _ in scans]

    config = RegistrationConfig(
        max_iterations=args.max_iters,
        likelihood_tolerance=args.tol,
        k_override=args.k,
        epsilon_reg=args.epsilon,
    )
    transforms, state = register(scans, initial, config)
    save_transforms(args.output, transforms)
    if args.trace is not None:
        trace_path = Path(args.trace)
        _write_trace_csv(state, trace_path)
        plots.save_trace_figure(state.records, trace_path.with_suffix(".png"))
    print(
        f"registered {len(scans)} scans in {state.iteration} iterations; "
        f"final log-likelihood {state.likelihood_trace[-1]:.6f}"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    measured = load_transforms(args.measured)
    truth = load_transforms(args.truth)
    if len(measured) != len(truth):
        print(
            f"error: {args.measured} has {len(measured)} transforms but "
            f"{args.truth} has {len(truth)}",
            file=sys.stderr,
        )
        return EXIT_IO
    report = error_report(measured, truth)
    report_path = (
        Path(args.report)
        if args.report is not None
        else Path(args.measured).with_name(Path(args.measured).stem + "_eval.csv")
    )
    write_report_csv(report, report_path)
    plots.save_error_figure(report, report_path.with_suffix(".png"))
    print(f"e_R {report.rotation_error:.6e}, e_t {report.translation_error:.6e}")
    return EXIT_OK


def cmd_synth(args) -> int:
    scene = make_scene(
        scans=args.scans,
        points_per_scan=args.points,
        perturb_rot=args.perturb_rot,
        perturb_trans=args.perturb_trans,
        seed=args.seed,
    )
    paths = write_scene(scene, args.output)
    print(f"wrote {len(scene.point_sets)} scans to {args.output} (scene diagonal {scene.diagonal:.6g})")
    for name in sorted(paths):
        print(f"  {paths[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvndt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_reg = sub.add_parser("register", help="jointly register two or more scans")
    p_reg.add_argument("--input", action="append", default=[], metavar="SCAN",
                       help="scan file (.xyz or ascii .ply); repeat in scan order")
    p_reg.add_argument("--init", default=None, help="initial transform file (default: identities)")
    p_reg.add_argument("--output", required=True, help="output transform file")
    p_reg.add_argument("--trace", default=None, help="per-iteration trace CSV (+ PNG)")
    p_reg.add_argument("--max-iters", type=int, default=300)
    p_reg.add_argument("--tol", type=float, default=1e-6,
                       help="absolute log-likelihood change for termination")
    p_reg.add_argument("--k", type=int, default=None, help="override the cluster count")
    p_reg.add_argument("--epsilon", type=float, default=1e-6,
                       help="covariance regularization term")
    p_reg.add_argument("--downsample", type=int, default=2000,
                       help="per-scan point budget before registration")
    p_reg.set_defaults(func=cmd_register)

    p_eval = sub.add_parser("eval", help="compare a transform file against ground truth")
    p_eval.add_argument("measured", help="estimated transform file")
    p_eval.add_argument("truth", help="ground-truth transform file")
    p_eval.add_argument("--report", default=None,
                        help="per-scan CSV path (+ PNG); default <measured>_eval.csv")
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a synthetic benchmark scene")
    p_synth.add_argument("--output", required=True, help="output directory")
    p_synth.add_argument("--scans", type=int, default=5)
    p_synth.add_argument("--points", type=int, default=2000)
    p_synth.add_argument("--perturb-rot", type=float, default=0.0,
                         help="max initial rotation offset in radians")
    p_synth.add_argument("--perturb-trans", type=float, default=0.0,
                         help="max initial translation offset in scan units")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RegistrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
