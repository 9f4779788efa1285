"""Command-line front end: geometry design, coarray analysis, and experiments."""

from __future__ import annotations

import argparse
import json
import sys

from .coarray import report, search_gaps
from .coupling import coupling_leakage, coupling_matrix
from .experiments import (ExperimentConfig, GEOMETRY_NAMES, build_geometry,
                          run_identify, run_sweep)


def _print_design(array, name: str, n: int) -> None:
    rep = report(array)
    print(f"{name}({n}): {array.sensor_count} sensors, aperture {array.aperture}")
    print("sub-ULAs (initial, interspace, count):")
    for sub in array.sub_ulas:
        print(f"  ({sub.initial}, {sub.interspace}, {sub.count})")
    if len(array.sub_ulas) > 1:
        print(f"gaps: {', '.join(str(g) for g in array.gaps)}")
    print(f"positions: {', '.join(str(p) for p in array.positions)}")
    _print_report(rep)


def _print_report(rep) -> None:
    print(f"DOF={rep.dof} J={rep.j_value} uDOF={rep.udof} hole_free={rep.hole_free}")
    print(f"spatial efficiency: {rep.spatial_efficiency} "
          f"(~{float(rep.spatial_efficiency):.4f})")
    w = rep.first_weights
    print(f"w(1)={w[0]} w(2)={w[1]} w(3)={w[2]} w(4)={w[3]}")


def _cmd_design(args) -> int:
    array = build_geometry(args.geometry, args.n)
    _print_design(array, args.geometry, args.n)
    return 0


def _cmd_analyze(args) -> int:
    with open(args.positions_file, encoding="utf-8") as fh:
        positions = [int(line) for line in fh if line.strip()]
    if positions != sorted(positions):
        raise ValueError("positions file must list integers in ascending order")
    print(f"{len(set(positions))} sensors, aperture {max(positions) - min(positions)}")
    _print_report(report(positions))
    return 0


def _cmd_coupling(args) -> int:
    from .coupling import CouplingModel
    import cmath
    array = build_geometry(args.geometry, args.n)
    model = CouplingModel(args.c1_mag * cmath.exp(1j * args.c1_phase), args.band)
    leakage = coupling_leakage(coupling_matrix(array.positions, model))
    print(f"{args.geometry}({args.n}) |c1|={args.c1_mag} band={args.band}: "
          f"leakage={leakage!r}")
    return 0


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config_file)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        values = {f: getattr(config, f) for f in config.__dataclass_fields__}
        values.update(overrides)
        config = ExperimentConfig.from_mapping(values)
    return config


def _cmd_sweep(args) -> int:
    manifest = run_sweep(_load_config(args))
    print(f"manifest written to {manifest}")
    return 0


def _cmd_identify(args) -> int:
    manifest = run_identify(_load_config(args))
    print(f"manifest written to {manifest}")
    return 0


def _cmd_search_gaps(args) -> int:
    with open(args.spec_file, encoding="utf-8") as fh:
        spec = json.load(fh)
    kwargs = {}
    if "node_budget" in spec:
        kwargs["node_budget"] = spec["node_budget"]
    solutions = search_gaps(
        [tuple(p) for p in spec["prototypes"]],
        spec["transfer_index"], spec["max_gap"], **kwargs)
    for gaps in solutions:
        print(",".join(str(g) for g in gaps))
    print(f"# {len(solutions)} feasible gap assignments", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulafit",
        description="Sparse array design from sub-ULAs: geometry, coarray "
                    "analysis, coupling leakage, and DOA experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="print a geometry and its coarray report")
    p.add_argument("geometry", choices=GEOMETRY_NAMES)
    p.add_argument("n", type=int, help="total number of sensors")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("analyze", help="coarray report for a positions file "
                                       "(one integer per line, ascending)")
    p.add_argument("positions_file")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("coupling", help="coupling leakage of a geometry")
    p.add_argument("geometry", choices=GEOMETRY_NAMES)
    p.add_argument("n", type=int)
    p.add_argument("--c1-mag", type=float, default=0.5)
    p.add_argument("--c1-phase", type=float, default=1.0471975511965976)
    p.add_argument("--band", type=int, default=100)
    p.set_defaults(func=_cmd_coupling)

    for name, func, help_text in (
            ("sweep", _cmd_sweep, "run a sweep config and emit CSVs"),
            ("identify", _cmd_identify, "run an identifiability config")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config_file")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--out", default=None, help="override out_dir")
        p.add_argument("--trials", type=int, default=None, help="override trials")
        p.set_defaults(func=func)

    p = sub.add_parser("search-gaps", help="bounded search for feasible gap tuples")
    p.add_argument("spec_file")
    p.set_defaults(func=_cmd_search_gaps)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
