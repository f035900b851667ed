"""Experiment drivers behind the CLI: baseline reports, optimization runs,
r sweeps with threshold readouts, generalization studies, and the ordering
trade-off table.

Every driver returns a plain-dict payload (see FORMATS.md) that is fully
determined by its inputs and master seed. Independent cells of a sweep may
fan out across worker processes; results are collected in cell order, so
parallelism never changes the output.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .cmaes import cma_run
from .fitness import FitnessContext, error_reduction_pct, evaluate
from .model import ChainInstance, TermOrdering, merged_gate_count, unmerged_gate_count
from .records import (
    PURPOSE_APPEND,
    PURPOSE_CMA,
    PURPOSE_HOLDOUT,
    PURPOSE_INSTANCE,
    PURPOSE_ORDERING,
    PURPOSE_PERMS,
    PURPOSE_SAMPLING,
    derive_generator,
    derive_seed_sequence,
    instance_from_dict,
    instance_to_dict,
)
from .sampler import SamplingPlan, run_sampling
from .trotter import CoefficientVector, DecompositionSpec, suzuki_seed

__all__ = [
    "baseline_report",
    "default_generations",
    "default_sigma0",
    "generalize",
    "generate_instance",
    "make_ordering",
    "optimize_instance",
    "perms_study",
    "pmap",
    "sampling_report",
    "sweep_r",
]

GENERALIZE_N_CAP = 8  # 2^8-dim matrices keep a sweep in desk-scale minutes


def default_generations(k: int) -> int:
    """Fixed budgets: 250 generations at k = 2, 500 for the larger k = 3 space."""
    return 500 if k >= 3 else 250


def default_sigma0(k: int) -> float:
    """Initial step size 1e-7 / d with d the optimized vector's length."""
    d = 5 * (k - 1)
    if d == 0:
        raise ValueError("k = 1 has no coefficients to optimize")
    return 1e-7 / d


def pmap(fn, items, jobs: int = 1) -> list:
    """Map preserving item order; jobs > 1 fans out across processes."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def make_ordering(name: str, instance: ChainInstance, master_seed: int | None = None) -> TermOrdering:
    """Resolve a CLI ordering name; "random" draws a permutation of the term
    list from the seed's ordering stream."""
    if name == "canonical":
        return TermOrdering.canonical()
    if name == "grouped":
        return TermOrdering.grouped()
    if name == "random":
        if master_seed is None:
            raise ValueError("random ordering needs a seed")
        rng = derive_generator(master_seed, PURPOSE_ORDERING)
        return TermOrdering.explicit(rng.permutation(4 * instance.n))
    raise ValueError(f"unknown ordering {name!r}")


def generate_instance(n: int, t: float | None, master_seed: int) -> ChainInstance:
    rng = derive_generator(master_seed, PURPOSE_INSTANCE)
    return ChainInstance.random(n, rng, t=t, seed=master_seed)


def _spec_dict(spec: DecompositionSpec) -> dict:
    return {"k": spec.k, "r": spec.r, "ordering": spec.ordering.to_dict()}


def _spec_from_dict(d: dict) -> DecompositionSpec:
    return DecompositionSpec(int(d["k"]), int(d["r"]), TermOrdering.from_dict(d["ordering"]))


def baseline_report(instance: ChainInstance, spec: DecompositionSpec) -> dict:
    """Suzuki-seed error plus gate counts for one decomposition."""
    ctx = FitnessContext.create(instance, spec)
    error = evaluate(ctx, suzuki_seed(spec.k))
    return {
        "command": "baseline",
        "instance": instance_to_dict(instance),
        "spec": _spec_dict(spec),
        "error": error,
        "unmerged_gates": unmerged_gate_count(instance, spec.k, spec.r),
        "merged_gates": merged_gate_count(instance, spec.ordering, spec.k, spec.r),
    }


def optimize_instance(
    instance: ChainInstance,
    spec: DecompositionSpec,
    generations: int,
    sigma0: float,
    master_seed: int,
    rng_key: tuple[int, ...] = (PURPOSE_CMA,),
) -> dict:
    """One CMA-ES run from the Suzuki seed; returns the run-record payload."""
    if generations < 1:
        raise ValueError("generations must be >= 1")
    ctx = FitnessContext.create(instance, spec)
    seed_vec = suzuki_seed(spec.k)

    def objective(x):
        return evaluate(ctx, CoefficientVector(spec.k, tuple(float(c) for c in x)))

    result = cma_run(
        seed_vec.components,
        objective,
        generations=generations,
        sigma0=sigma0,
        rng_seed=derive_seed_sequence(master_seed, *rng_key),
    )
    error_initial = evaluate(ctx, seed_vec)
    error_final = result.best_fitness
    return {
        "command": "optimize",
        "instance": instance_to_dict(instance),
        "spec": _spec_dict(spec),
        "seed": master_seed,
        "sigma0": sigma0,
        "generations": generations,
        "p_initial": list(seed_vec.components),
        "p_final": [float(x) for x in result.best_x],
        "error_initial": error_initial,
        "error_final": error_final,
        "reduction_pct": error_reduction_pct(error_initial, error_final),
        "final_centroid": [float(x) for x in result.final_mean],
        "final_centroid_error": result.final_mean_fitness,
        "evaluations": result.evaluations,
        "repairs": result.repairs,
        "trajectory": [
            [p.generation, p.best_fitness, p.centroid_fitness, p.sigma, p.nonfinite]
            for p in result.trajectory
        ],
    }


def _sweep_cell(args: tuple) -> dict:
    instance_dict, spec_dict, mode, p_fixed, generations, sigma0, master_seed, cell_index = args
    instance = instance_from_dict(instance_dict)
    spec = _spec_from_dict(spec_dict)
    ctx = FitnessContext.create(instance, spec)
    baseline = evaluate(ctx, suzuki_seed(spec.k))
    row: dict = {"r": spec.r, "baseline_error": baseline}
    if mode == "optimize":
        run = optimize_instance(
            instance, spec, generations, sigma0, master_seed, rng_key=(PURPOSE_CMA, cell_index)
        )
        row["optimized_error"] = run["error_final"]
        row["p_final"] = run["p_final"]
    elif mode == "evaluate":
        row["optimized_error"] = evaluate(ctx, CoefficientVector(spec.k, tuple(p_fixed)))
    if "optimized_error" in row:
        row["reduction_pct"] = error_reduction_pct(baseline, row["optimized_error"])
    return row


def sweep_r(
    instance: ChainInstance,
    k: int,
    r_grid: list[int],
    ordering: TermOrdering,
    mode: str = "baseline",
    p_fixed: list[float] | None = None,
    generations: int | None = None,
    sigma0: float | None = None,
    master_seed: int = 0,
    threshold: float | None = None,
    jobs: int = 1,
) -> dict:
    """Baseline (and optional optimized) error per r on one instance.

    ``mode`` is one of baseline / optimize / evaluate; "evaluate" scores a
    fixed coefficient vector at every r. A threshold adds the smallest grid
    r whose error beats it, for the gate-saving readout.
    """
    if not r_grid:
        raise ValueError("r grid must be non-empty")
    if sorted(r_grid) != list(r_grid) or len(set(r_grid)) != len(r_grid):
        raise ValueError("r grid must be strictly increasing")
    if mode not in ("baseline", "optimize", "evaluate"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    if mode == "evaluate" and p_fixed is None:
        raise ValueError("evaluate mode needs a coefficient vector")
    generations = default_generations(k) if generations is None else generations
    sigma0 = default_sigma0(k) if sigma0 is None else sigma0
    cells = [
        (
            instance_to_dict(instance),
            _spec_dict(DecompositionSpec(k, r, ordering)),
            mode,
            p_fixed,
            generations,
            sigma0,
            master_seed,
            i,
        )
        for i, r in enumerate(r_grid)
    ]
    rows = pmap(_sweep_cell, cells, jobs)
    payload = {
        "command": "sweep-r",
        "instance": instance_to_dict(instance),
        "k": k,
        "ordering": ordering.to_dict(),
        "mode": mode,
        "seed": master_seed,
        "rows": rows,
    }
    if mode == "optimize":
        payload["generations"] = generations
        payload["sigma0"] = sigma0
    if threshold is not None:
        payload["threshold"] = threshold
        payload["baseline_r_at_threshold"] = next(
            (row["r"] for row in rows if row["baseline_error"] < threshold), None
        )
        if mode != "baseline":
            payload["optimized_r_at_threshold"] = next(
                (row["r"] for row in rows if row.get("optimized_error", np.inf) < threshold), None
            )
    return payload


def generalize(
    run_payload: dict,
    axis: str,
    grid: list,
    n_cap: int = GENERALIZE_N_CAP,
) -> dict:
    """Score a run's optimized vector and the Suzuki seed over a grid of one
    parameter (v / n / t / r), everything else frozen from the run.

    Hold-out disorder vectors and appended components derive from the run's
    seed lineage, so the study is reproducible from the record alone.
    """
    base_instance = instance_from_dict(run_payload["instance"])
    spec = _spec_from_dict(run_payload["spec"])
    k = spec.k
    p_opt = CoefficientVector(k, tuple(run_payload["p_final"]))
    p_seed = suzuki_seed(k)
    record_seed = int(run_payload["seed"])

    points: list[tuple[float, ChainInstance, DecompositionSpec]] = []
    if axis == "v":
        count = int(grid[0]) if len(grid) == 1 else len(grid)
        for i in range(1, count + 1):
            rng = derive_generator(record_seed, PURPOSE_HOLDOUT, i)
            inst = ChainInstance.random(base_instance.n, rng, t=base_instance.t)
            points.append((float(i), inst, spec))
    elif axis == "n":
        for n_new in grid:
            n_new = int(n_new)
            if n_new <= base_instance.n:
                raise ValueError(f"axis=n grid values must exceed n={base_instance.n}")
            if n_new > n_cap:
                raise ValueError(f"axis=n capped at {n_cap} (override with --n-cap)")
            rng = derive_generator(record_seed, PURPOSE_APPEND, n_new)
            extra = tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=n_new - base_instance.n))
            inst = ChainInstance(n_new, base_instance.v + extra, base_instance.t)
            points.append((float(n_new), inst, spec))
    elif axis == "t":
        for t_new in grid:
            inst = ChainInstance(base_instance.n, base_instance.v, float(t_new), seed=base_instance.seed)
            points.append((float(t_new), inst, spec))
    elif axis == "r":
        for r_new in grid:
            new_spec = DecompositionSpec(k, int(r_new), spec.ordering)
            points.append((float(r_new), base_instance, new_spec))
    else:
        raise ValueError(f"unknown axis {axis!r}")

    rows = []
    for value, inst, point_spec in points:
        ctx = FitnessContext.create(inst, point_spec)
        baseline = evaluate(ctx, p_seed)
        optimized = evaluate(ctx, p_opt)
        rows.append(
            {
                "value": value,
                "baseline_error": baseline,
                "optimized_error": optimized,
                "reduction_pct": error_reduction_pct(baseline, optimized),
            }
        )
    return {
        "command": "generalize",
        "axis": axis,
        "source_instance": run_payload["instance"],
        "spec": run_payload["spec"],
        "seed": record_seed,
        "p_optimized": list(p_opt.components),
        "rows": rows,
    }


def perms_study(
    instance: ChainInstance,
    k: int,
    r_grid: list[int],
    n_random: int = 20,
    master_seed: int = 0,
) -> dict:
    """Gate count vs Suzuki-seed error for grouped, canonical, and averaged
    random term orderings, per r."""
    if not r_grid:
        raise ValueError("r grid must be non-empty")
    seed_vec = suzuki_seed(k)
    rng = derive_generator(master_seed, PURPOSE_PERMS)
    random_orderings = [
        TermOrdering.explicit(rng.permutation(4 * instance.n)) for _ in range(n_random)
    ]
    rows = []
    for r in r_grid:
        for name, ordering in (("grouped", TermOrdering.grouped()), ("canonical", TermOrdering.canonical())):
            spec = DecompositionSpec(k, r, ordering)
            ctx = FitnessContext.create(instance, spec)
            rows.append(
                {
                    "ordering": name,
                    "r": r,
                    "merged_gates": merged_gate_count(instance, ordering, k, r),
                    "unmerged_gates": unmerged_gate_count(instance, k, r),
                    "error": evaluate(ctx, seed_vec),
                }
            )
        counts, errors = [], []
        for ordering in random_orderings:
            spec = DecompositionSpec(k, r, ordering)
            ctx = FitnessContext.create(instance, spec)
            counts.append(merged_gate_count(instance, ordering, k, r))
            errors.append(evaluate(ctx, seed_vec))
        rows.append(
            {
                "ordering": "random",
                "r": r,
                "merged_gates": float(np.mean(counts)),
                "unmerged_gates": unmerged_gate_count(instance, k, r),
                "error": float(np.mean(errors)),
            }
        )
    return {
        "command": "perms",
        "instance": instance_to_dict(instance),
        "k": k,
        "n_random": n_random,
        "seed": master_seed,
        "rows": rows,
    }


def sampling_report(plan: SamplingPlan, master_seed: int) -> dict:
    stats = run_sampling(plan, derive_generator(master_seed, PURPOSE_SAMPLING))
    return {
        "command": "sample",
        "instance": instance_to_dict(plan.instance),
        "spec": _spec_dict(plan.spec),
        "scheme": plan.scheme.value,
        "samples_per_scale": plan.samples_per_scale,
        "seed": master_seed,
        "rows": [
            {
                "scale": s.scale,
                "mean_fitness": s.mean_fitness,
                "min_fitness": s.min_fitness,
                "max_fitness": s.max_fitness,
            }
            for s in stats
        ],
    }
