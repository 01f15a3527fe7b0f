"""Command-line front end.

Subcommands: validate, simulate, equilibria, count, basins, report.
Models come from a JSON file (--model) or a built-in fixture
(--fixture). Human-readable tables round state values to 4 decimals;
JSON artifacts carry full precision.

Exit codes: 0 success, 2 assumption failure, 3 counting-law violation on
a complete atlas, 4 degenerate equilibrium, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import counting, dynamics, equilibria, fixtures, kernels
from .errors import (
    AssumptionError,
    BivirusError,
    DegenerateEquilibrium,
    ModelFormatError,
    PreconditionError,
)
from .model import (
    BivirusModel,
    State,
    load_model,
    model_hash,
    model_to_dict,
    validate,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSUMPTION = 2
EXIT_COUNTING = 3
EXIT_DEGENERATE = 4

OUTDIR_ENV = "BIVIRUS_OUTDIR"


def _add_model_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=Path, help="model JSON file")
    src.add_argument(
        "--fixture",
        help=f"built-in model ({', '.join(fixtures.fixture_names())})",
    )


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--out",
        type=Path,
        default=None,
        help=f"output directory (default: ${OUTDIR_ENV} or current directory)",
    )
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--seed", type=int, default=42, help="random generator seed")


def _add_budget_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--random-seeds", type=int, default=500)
    p.add_argument("--grid-levels", type=int, default=5)
    p.add_argument("--confirm-tail", type=int, default=200)
    p.add_argument("--homotopy-steps", type=int, default=32)
    p.add_argument(
        "--blocks",
        default=None,
        help="homotopy block partition, e.g. '0,1;2,3' (default: auto-detect)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bivirus",
        description="Equilibrium enumeration and counting-law certification "
        "for networked bivirus SIS dynamics",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=os.cpu_count() or 1,
        help="worker processes for basin sampling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the standing assumptions")
    _add_model_args(p)
    _add_common_args(p)

    p = sub.add_parser("simulate", help="integrate trajectories to CSV")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument(
        "--x0",
        action="append",
        default=None,
        help="comma-separated 2n initial values (repeatable)",
    )
    p.add_argument("--random", type=int, default=0, help="additional random starts")
    p.add_argument("--t-max", type=float, default=dynamics.DEFAULT_T_MAX)
    p.add_argument("--rtol", type=float, default=dynamics.DEFAULT_RTOL)
    p.add_argument("--atol", type=float, default=dynamics.DEFAULT_ATOL)

    p = sub.add_parser("equilibria", help="enumerate and classify equilibria")
    _add_model_args(p)
    _add_common_args(p)
    _add_budget_args(p)

    p = sub.add_parser("count", help="certify the counting laws")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=Path)
    src.add_argument("--fixture")
    src.add_argument("--atlas", type=Path, help="previously written atlas JSON")
    _add_common_args(p)
    _add_budget_args(p)

    p = sub.add_parser("basins", help="sample basins of attraction")
    _add_model_args(p)
    _add_common_args(p)
    _add_budget_args(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--t-max", type=float, default=dynamics.DEFAULT_T_MAX)

    p = sub.add_parser("report", help="run everything into one directory")
    _add_model_args(p)
    _add_common_args(p)
    _add_budget_args(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--t-max", type=float, default=dynamics.DEFAULT_T_MAX)

    return parser


def _load(args) -> BivirusModel:
    if getattr(args, "fixture", None):
        return fixtures.get_fixture(args.fixture)
    return load_model(args.model)


def _outdir(args) -> Path:
    out = args.out or Path(os.environ.get(OUTDIR_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _budget(args) -> equilibria.SearchBudget:
    blocks = None
    if getattr(args, "blocks", None):
        blocks = tuple(
            tuple(int(i) for i in part.split(",")) for part in args.blocks.split(";")
        )
    return equilibria.SearchBudget(
        grid_levels=args.grid_levels,
        random_seeds=args.random_seeds,
        confirm_tail=args.confirm_tail,
        rng_seed=args.seed,
        homotopy_steps=args.homotopy_steps,
        blocks=blocks,
    )


def _dump_json(data: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _fmt4(v: float) -> str:
    return f"{v:.4f}"


def _validation_table(report) -> str:
    rows = [
        ("D1 positive definite", report.d1_positive),
        ("D2 positive definite", report.d2_positive),
        ("B1 nonnegative", report.b1_nonnegative),
        ("B2 nonnegative", report.b2_nonnegative),
        ("B1 irreducible", report.b1_irreducible),
        ("B2 irreducible", report.b2_irreducible),
        (f"R1 = {report.r1:.6g} > 1" if report.r1 is not None else "R1",
         report.r1 is not None and report.r1 > 1),
        (f"R2 = {report.r2:.6g} > 1" if report.r2 is not None else "R2",
         report.r2 is not None and report.r2 > 1),
    ]
    lines = [f"  {'PASS' if ok else 'FAIL'}  {name}" for name, ok in rows]
    lines.extend(f"  note: {msg}" for msg in report.failures)
    lines.append(f"assumptions: {'PASS' if report.ok else 'FAIL'}")
    return "\n".join(lines)


def _atlas_table(atlas: equilibria.EquilibriumAtlas) -> str:
    n = atlas.n
    lines = [
        f"{'#':>2} {'class':18} {'n_k':>3} {'index':>5} {'residual':>9} "
        f"{'margin':>9}  state (x1 | x2)"
    ]
    for i, eq in enumerate(atlas.equilibria):
        x1 = " ".join(_fmt4(v) for v in eq.state.x1)
        x2 = " ".join(_fmt4(v) for v in eq.state.x2)
        lines.append(
            f"{i:>2} {eq.eq_class.value:18} {eq.n_k:>3} {eq.index:>+5} "
            f"{eq.residual:>9.1e} {eq.hyperbolic_margin:>9.1e}  {x1} | {x2}"
        )
    lines.append(
        f"{len(atlas.equilibria)} equilibria (n={n}); complete={atlas.complete}"
    )
    return "\n".join(lines)


def _count_table(report: counting.CountReport) -> str:
    lines = [
        f"configuration: {report.configuration.value}",
        f"Poincare-Hopf sum: {report.ph_sum} "
        f"{'(holds)' if report.ph_holds else '(VIOLATED)'}",
        "Morse vector c: " + " ".join(str(v) for v in report.morse.c),
    ]
    for v in report.morse_verdicts:
        relation = "=" if v.index == 2 * report.morse.n else ">="
        mark = "✓" if v.holds else "✗"
        lines.append(f"  {mark} sum_{v.index}: {v.lhs} {relation} {v.rhs}")
    b = report.coexistence_bounds
    lines.append(
        f"coexistence: {report.coexistence_count} found; bound k >= {b.k_min} "
        f"({b.parity}), even-n_k >= {b.even_nk_min}, odd-n_k >= {b.odd_nk_min}"
        + (", stable coexistence guaranteed" if b.stable_guaranteed else "")
    )
    return "\n".join(lines)


def _basin_table(sample: dynamics.BasinSample, atlas) -> str:
    lines = [f"{'attractor':>9} {'class':18} {'hits':>5}"]
    for idx, hits in sample.tally.items():
        lines.append(f"{idx:>9} {atlas.equilibria[idx].eq_class.value:18} {hits:>5}")
    lines.append(
        f"{len(sample.attractor_ids)} samples, {sample.unresolved} unresolved, "
        f"{len(sample.tally)} distinct attractors"
    )
    return "\n".join(lines)


def _cmd_validate(args) -> int:
    report = validate(_load(args))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(_validation_table(report))
    return EXIT_OK if report.ok else EXIT_ASSUMPTION


def _cmd_simulate(args) -> int:
    model = _load(args)
    out = _outdir(args)
    starts: list[State] = []
    for spec_str in args.x0 or []:
        vals = np.array([float(v) for v in spec_str.split(",")])
        starts.append(State.from_stacked(vals))
    rng = np.random.default_rng(args.seed)
    for _ in range(args.random):
        u = rng.random(model.n)
        v = rng.random(model.n)
        over = u + v > 1.0
        u[over], v[over] = 1.0 - u[over], 1.0 - v[over]
        starts.append(State(u, v))
    if not starts:
        raise PreconditionError("no initial conditions; pass --x0 or --random")
    paths = []
    for k, s0 in enumerate(starts):
        traj = dynamics.integrate(
            model, s0, t_max=args.t_max, rtol=args.rtol, atol=args.atol
        )
        path = out / f"trajectory_{k}.csv"
        dynamics.trajectory_to_csv(traj, path, n=model.n)
        paths.append(path)
        print(
            f"{path}: {traj.terminal.value} at t={traj.times[-1]:.6g}, "
            f"{traj.times.shape[0]} rows, max region violation "
            f"{traj.max_region_violation:.2e}"
        )
    return EXIT_OK


def _enumerate(args, model):
    return equilibria.enumerate_all(model, _budget(args))


def _cmd_equilibria(args) -> int:
    model = _load(args)
    out = _outdir(args)
    atlas = _enumerate(args, model)
    _dump_json(equilibria.atlas_to_dict(atlas), out / "atlas.json")
    if args.format == "json":
        print(json.dumps(equilibria.atlas_to_dict(atlas), indent=2))
    else:
        print(_atlas_table(atlas))
    return EXIT_OK


def _cmd_count(args) -> int:
    out = _outdir(args)
    if getattr(args, "atlas", None):
        with open(args.atlas, "r", encoding="utf-8") as fh:
            atlas = equilibria.atlas_from_dict(json.load(fh))
    else:
        atlas = _enumerate(args, _load(args))
    report = counting.build_count_report(atlas)
    _dump_json(counting.report_to_dict(report), out / "count.json")
    if args.format == "json":
        print(json.dumps(counting.report_to_dict(report), indent=2))
    else:
        print(_count_table(report))
    violated = not (report.ph_holds and all(v.holds for v in report.morse_verdicts))
    if violated and atlas.complete:
        return EXIT_COUNTING
    return EXIT_OK


def _cmd_basins(args) -> int:
    model = _load(args)
    out = _outdir(args)
    atlas = _enumerate(args, model)
    sample = dynamics.basin_sample(
        model,
        atlas,
        args.samples,
        rng_seed=args.seed,
        t_max=args.t_max,
        workers=args.workers,
    )
    data = {
        "model_hash": model_hash(model),
        "samples": len(sample.attractor_ids),
        "unresolved": sample.unresolved,
        "tally": {str(k): v for k, v in sample.tally.items()},
        "warnings": list(sample.warnings),
    }
    _dump_json(data, out / "basins.json")
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        print(_basin_table(sample, atlas))
    return EXIT_OK


def _cmd_report(args) -> int:
    model = _load(args)
    out = _outdir(args)
    artifacts = {}

    report = validate(model)
    _dump_json(report.to_dict(), out / "validation.json")
    artifacts["validation"] = "validation.json"
    print(_validation_table(report))
    if not report.ok:
        _dump_json(
            {"model": model_to_dict(model), "artifacts": artifacts},
            out / "index.json",
        )
        return EXIT_ASSUMPTION

    atlas = _enumerate(args, model)
    _dump_json(equilibria.atlas_to_dict(atlas), out / "atlas.json")
    artifacts["atlas"] = "atlas.json"
    print(_atlas_table(atlas))

    count_report = counting.build_count_report(atlas)
    _dump_json(counting.report_to_dict(count_report), out / "count.json")
    artifacts["count"] = "count.json"
    print(_count_table(count_report))

    sample = dynamics.basin_sample(
        model,
        atlas,
        args.samples,
        rng_seed=args.seed,
        t_max=args.t_max,
        workers=args.workers,
    )
    basins = {
        "model_hash": model_hash(model),
        "samples": len(sample.attractor_ids),
        "unresolved": sample.unresolved,
        "tally": {str(k): v for k, v in sample.tally.items()},
        "warnings": list(sample.warnings),
    }
    _dump_json(basins, out / "basins.json")
    artifacts["basins"] = "basins.json"
    print(_basin_table(sample, atlas))

    rng = np.random.default_rng(args.seed)
    for k in range(3):
        u = rng.random(model.n)
        v = rng.random(model.n)
        over = u + v > 1.0
        u[over], v[over] = 1.0 - u[over], 1.0 - v[over]
        traj = dynamics.integrate(
            model,
            State(u, v),
            t_max=args.t_max,
            targets=np.array([eq.state.stacked() for eq in atlas.equilibria]),
        )
        name = f"trajectory_{k}.csv"
        dynamics.trajectory_to_csv(traj, out / name, n=model.n)
        artifacts[f"trajectory_{k}"] = name

    index = {
        "model": model_to_dict(model),
        "model_hash": model_hash(model),
        "kernel_backend": kernels.BACKEND,
        "artifacts": artifacts,
        "complete": atlas.complete,
    }
    _dump_json(index, out / "index.json")
    print(f"report written to {out}")

    violated = not (
        count_report.ph_holds and all(v.holds for v in count_report.morse_verdicts)
    )
    if violated and atlas.complete:
        return EXIT_COUNTING
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "equilibria": _cmd_equilibria,
    "count": _cmd_count,
    "basins": _cmd_basins,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except AssumptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except DegenerateEquilibrium as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ModelFormatError, PreconditionError, BivirusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
