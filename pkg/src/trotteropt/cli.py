"""Command-line entry point.

Subcommands: generate-instance, baseline, optimize, sample, sweep-r,
generalize, perms. Every command is deterministic given --seed; results go
to --out as a JSON record plus a flat CSV twin next to it (see FORMATS.md).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .records import load_instance, read_record, save_instance, write_csv, write_record
from .sampler import DEFAULT_SCALES, SamplingPlan, SamplingScheme
from .trotter import DecompositionSpec

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    if "instance" in names:
        parser.add_argument("--instance", required=True, help="instance JSON path")
    if "k" in names:
        parser.add_argument("--k", type=int, default=2, help="formula order parameter (default 2)")
    if "r" in names:
        parser.add_argument("--r", type=int, required=True, help="time-slice count")
    if "ordering" in names:
        parser.add_argument(
            "--ordering",
            choices=["canonical", "grouped", "random"],
            default="grouped",
            help="term ordering (default grouped)",
        )
    if "seed" in names:
        parser.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    if "out" in names:
        parser.add_argument("--out", required=True, help="output JSON path")
    if "jobs" in names:
        parser.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _emit(args, payload: dict, csv_header: list[str], csv_rows) -> None:
    out = Path(args.out)
    write_record(out, payload)
    write_csv(out.with_suffix(".csv"), csv_header, csv_rows)


def _cmd_generate_instance(args) -> str:
    instance = experiments.generate_instance(args.n, args.t, args.seed)
    save_instance(args.out, instance)
    return f"wrote instance n={instance.n} t={instance.t} to {args.out}"


def _cmd_baseline(args) -> str:
    instance = load_instance(args.instance)
    ordering = experiments.make_ordering(args.ordering, instance, args.seed)
    payload = experiments.baseline_report(instance, DecompositionSpec(args.k, args.r, ordering))
    if args.out:
        _emit(
            args,
            payload,
            ["k", "r", "ordering", "error", "unmerged_gates", "merged_gates"],
            [[args.k, args.r, args.ordering, payload["error"],
              payload["unmerged_gates"], payload["merged_gates"]]],
        )
    return (
        f"baseline error {payload['error']:.6e} "
        f"gates {payload['unmerged_gates']} unmerged / {payload['merged_gates']} merged"
    )


def _cmd_optimize(args) -> str:
    instance = load_instance(args.instance)
    ordering = experiments.make_ordering(args.ordering, instance, args.seed)
    spec = DecompositionSpec(args.k, args.r, ordering)
    generations = args.generations if args.generations else experiments.default_generations(args.k)
    sigma0 = args.sigma0 if args.sigma0 else experiments.default_sigma0(args.k)
    payload = experiments.optimize_instance(instance, spec, generations, sigma0, args.seed)
    _emit(
        args,
        payload,
        ["generation", "best_fitness", "centroid_fitness", "sigma", "nonfinite"],
        payload["trajectory"],
    )
    return (
        f"optimized {payload['error_initial']:.6e} -> {payload['error_final']:.6e} "
        f"({payload['reduction_pct']:.1f}% reduction) in {generations} generations"
    )


def _cmd_sample(args) -> str:
    instance = load_instance(args.instance)
    ordering = experiments.make_ordering(args.ordering, instance, args.seed)
    plan = SamplingPlan(
        scheme=SamplingScheme(args.scheme),
        std_devs=tuple(args.scales),
        samples_per_scale=args.samples,
        spec=DecompositionSpec(args.k, args.r, ordering),
        instance=instance,
    )
    payload = experiments.sampling_report(plan, args.seed)
    _emit(
        args,
        payload,
        ["scale", "mean_fitness", "min_fitness", "max_fitness"],
        [[row["scale"], row["mean_fitness"], row["min_fitness"], row["max_fitness"]]
         for row in payload["rows"]],
    )
    return f"sampled {args.samples} vectors at {len(args.scales)} scales ({args.scheme})"


def _cmd_sweep_r(args) -> str:
    instance = load_instance(args.instance)
    ordering = experiments.make_ordering(args.ordering, instance, args.seed)
    p_fixed = None
    if args.mode == "evaluate":
        if not args.record:
            raise ValueError("--mode evaluate needs --record with an optimize run")
        p_fixed = read_record(args.record)["p_final"]
    payload = experiments.sweep_r(
        instance,
        args.k,
        args.r_grid,
        ordering,
        mode=args.mode,
        p_fixed=p_fixed,
        generations=args.generations,
        sigma0=args.sigma0,
        master_seed=args.seed,
        threshold=args.threshold,
        jobs=args.jobs,
    )
    _emit(
        args,
        payload,
        ["r", "baseline_error", "optimized_error", "reduction_pct"],
        [[row["r"], row["baseline_error"], row.get("optimized_error", ""),
          row.get("reduction_pct", "")] for row in payload["rows"]],
    )
    line = f"swept r over {args.r_grid} ({args.mode})"
    if args.threshold is not None:
        line += (
            f"; threshold {args.threshold:g}: baseline r={payload['baseline_r_at_threshold']}"
        )
        if "optimized_r_at_threshold" in payload:
            line += f", optimized r={payload['optimized_r_at_threshold']}"
    return line


def _cmd_generalize(args) -> str:
    run_payload = read_record(args.record)
    grid = _float_list(args.grid)
    payload = experiments.generalize(run_payload, args.axis, grid, n_cap=args.n_cap)
    _emit(
        args,
        payload,
        ["value", "baseline_error", "optimized_error", "reduction_pct"],
        [[row["value"], row["baseline_error"], row["optimized_error"], row["reduction_pct"]]
         for row in payload["rows"]],
    )
    positive = sum(1 for row in payload["rows"] if row["reduction_pct"] > 0)
    return f"generalized over {args.axis}: {positive}/{len(payload['rows'])} points improved"


def _cmd_perms(args) -> str:
    instance = load_instance(args.instance)
    payload = experiments.perms_study(instance, args.k, args.r_grid, args.n_random, args.seed)
    _emit(
        args,
        payload,
        ["ordering", "r", "merged_gates", "unmerged_gates", "error"],
        [[row["ordering"], row["r"], row["merged_gates"], row["unmerged_gates"], row["error"]]
         for row in payload["rows"]],
    )
    return f"ordering study over r={args.r_grid} with {args.n_random} random permutations"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trotteropt",
        description="Product-formula decompositions of Heisenberg-chain evolution, "
        "and CMA-ES optimization of their coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-instance", help="draw a disordered chain instance")
    p.add_argument("--n", type=int, required=True, help="qubit count (>= 3)")
    p.add_argument("--t", type=float, default=None, help="simulation time (default 2n)")
    _add_common(p, "seed", "out")
    p.set_defaults(func=_cmd_generate_instance)

    p = sub.add_parser("baseline", help="Suzuki-seed error and gate counts")
    _add_common(p, "instance", "k", "r", "ordering", "seed")
    p.add_argument("--out", default=None, help="optional output JSON path")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("optimize", help="CMA-ES run from the Suzuki seed")
    _add_common(p, "instance", "k", "r", "ordering", "seed", "out")
    p.add_argument("--generations", type=int, default=None, help="default 250 (500 for k >= 3)")
    p.add_argument("--sigma0", type=float, default=None, help="default 1e-7 / d")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sample", help="fitness landscape sampling")
    _add_common(p, "instance", "k", "r", "ordering", "seed", "out")
    p.add_argument("--scheme", choices=[s.value for s in SamplingScheme], required=True)
    p.add_argument("--scales", type=_float_list, default=list(DEFAULT_SCALES),
                   help="comma-separated std devs (default 1e-9..1)")
    p.add_argument("--samples", type=int, default=100, help="samples per scale (default 100)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("sweep-r", help="baseline/optimized error across r values")
    _add_common(p, "instance", "k", "ordering", "seed", "out", "jobs")
    p.add_argument("--r-grid", type=_int_list, required=True, help="comma-separated r values")
    p.add_argument("--mode", choices=["baseline", "optimize", "evaluate"], default="baseline")
    p.add_argument("--record", default=None, help="optimize record for --mode evaluate")
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None,
                   help="report smallest r with error below this")
    p.set_defaults(func=_cmd_sweep_r)

    p = sub.add_parser("generalize", help="evaluate an optimized vector off its training point")
    p.add_argument("--record", required=True, help="optimize record JSON")
    p.add_argument("--axis", choices=["v", "n", "t", "r"], required=True)
    p.add_argument("--grid", required=True,
                   help="comma-separated grid (axis=v: a single hold-out count)")
    p.add_argument("--n-cap", type=int, default=experiments.GENERALIZE_N_CAP)
    _add_common(p, "out")
    p.set_defaults(func=_cmd_generalize)

    p = sub.add_parser("perms", help="gate count vs error for term orderings")
    _add_common(p, "instance", "k", "seed", "out")
    p.add_argument("--r-grid", type=_int_list, required=True)
    p.add_argument("--n-random", type=int, default=20, help="random permutations to average")
    p.set_defaults(func=_cmd_perms)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        print(args.func(args))
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
