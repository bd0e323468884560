"""End-to-end runs, seed sweeps and verification, with file reports."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .cases import CaseConsistencyError, get_case, verify_case_consistency
from .config import RunConfig
from .evaluation import TrialStats, boundary_trace, evaluate_field
from .oracles import derivative_probe_suite
from .pipeline import solve_case

log = logging.getLogger(__name__)

FLOAT_FMT = "%.17e"
AGGREGATION_RULE = "relative L2 over the concatenation of all fields' test-grid samples"


class RunError(RuntimeError):
    pass


@dataclass
class RunReport:
    config: dict
    case: dict
    solver: dict
    relative_l2: dict
    boundary_traces: dict
    residuals: dict
    consistency_max_residual: float
    timings: dict
    artifacts: dict

    def as_dict(self):
        return asdict(self)


def _write_csv(path, header, columns, int_cols=()):
    """Write columns with full double precision; ``int_cols`` are written as integers."""
    n = len(columns[0]) if columns else 0
    fmt = ",".join("%d" if i in int_cols else FLOAT_FMT for i in range(len(columns)))
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        if n:
            np.savetxt(fh, np.column_stack(columns), fmt=fmt, delimiter=",")


def run(config: RunConfig, out_dir=None, write_grid=True) -> RunReport:
    """Solve one case, evaluate it and write the four report files."""
    cfg = config.resolved()
    out = Path(out_dir if out_dir is not None else Path(cfg.out) / f"case{cfg.case}_seed{cfg.seed}")
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()

    sol = solve_case(cfg)
    try:
        consistency = verify_case_consistency(sol.case, roster=sol.roster)
    except CaseConsistencyError as exc:
        raise RunError(str(exc)) from exc
    if not np.all(np.isfinite(sol.theta)):
        raise RunError("solver returned non-finite weights")

    t0 = time.perf_counter()
    ev = evaluate_field(sol.case, sol.basis, sol.theta, cfg.grid, cfg.grid_t)
    traces = [boundary_trace(sol.case, sol.basis, sol.theta, name, cfg.trace_samples) for name in sol.case.targets]
    t_eval = time.perf_counter() - t0

    case = sol.case
    spatial = ["x", "y"][: case.domain.spatial_dim]
    paths = {
        "report": str(out / "report.json"),
        "solution_grid": str(out / "solution_grid.csv"),
        "boundary_traces": str(out / "boundary_traces.csv"),
        "residuals": str(out / "residuals.csv"),
    }
    if write_grid:
        pts = np.vstack([g.points for g in ev.grids])
        field_col = np.concatenate([np.full(len(g.points), g.field_index + 1) for g in ev.grids])
        exact = np.concatenate([g.exact for g in ev.grids])
        pred = np.concatenate([g.predicted for g in ev.grids])
        cols = [pts[:, i] for i in range(pts.shape[1])] + [field_col, exact, pred, np.abs(exact - pred)]
        _write_csv(paths["solution_grid"], spatial + ["t", "field", "exact", "predicted", "abs_error"], cols,
                   int_cols=(pts.shape[1],))
    else:
        paths.pop("solution_grid")

    with open(paths["boundary_traces"], "w") as fh:
        fh.write("target,coord,t,exact,predicted,abs_error\n")
        for tr in traces:
            for row in zip(tr.coord, tr.t, tr.exact, tr.predicted, tr.abs_error):
                fh.write(tr.target + "," + ",".join(FLOAT_FMT % v for v in row) + "\n")

    with open(paths["residuals"], "w") as fh:
        fh.write("label,row_count,residual_norm\n")
        for label, norm in sol.residual.by_label.items():
            fh.write(f"{label},{sol.residual.counts[label]},{FLOAT_FMT % norm}\n")

    fields = ["u"] if case.n_fields == 1 else [f"u{j + 1}" for j in range(case.n_fields)]
    report = RunReport(
        config=cfg.as_dict(),
        case={
            "id": case.case_id,
            "title": case.title,
            "n_fields": case.n_fields,
            "diffusivities": list(case.diffusivities),
            "options": dict(case.options),
        },
        solver={**sol.diagnostics.as_dict(), "residual_norm_total": sol.residual.norm},
        relative_l2={
            "aggregate": ev.aggregate,
            "per_field": dict(zip(fields, ev.per_field)),
            "aggregation": AGGREGATION_RULE,
            "test_points": {f: len(g.points) for f, g in zip(fields, ev.grids)},
        },
        boundary_traces={tr.target: tr.relative_l2 for tr in traces},
        residuals={label: {"row_count": sol.residual.counts[label], "residual_norm": v}
                   for label, v in sol.residual.by_label.items()},
        consistency_max_residual=consistency,
        timings={
            "assembly": sol.assembly_time,
            "solve": sol.solve_time,
            "evaluation": t_eval,
            "total": time.perf_counter() - t_start,
        },
        artifacts=paths,
    )
    with open(paths["report"], "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)
    log.info("case %d seed %d: L2 %.3e", cfg.case, cfg.seed, ev.aggregate)
    return report


def sweep(config: RunConfig, seeds, out_dir=None, write_grid=True):
    """Run every seed into its own sub-directory and summarise."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seed list is empty")
    cfg = config.resolved()
    root = Path(out_dir if out_dir is not None else Path(cfg.out) / f"case{cfg.case}_sweep")
    root.mkdir(parents=True, exist_ok=True)
    stats = TrialStats(seeds)
    reports = {}
    for seed in seeds:
        t0 = time.perf_counter()
        try:
            rep = run(replace(cfg, seed=seed), root / f"seed_{seed}", write_grid=write_grid)
            stats.l2.append(rep.relative_l2["aggregate"])
            reports[seed] = rep.artifacts["report"]
        except Exception as exc:
            log.error("seed %d failed: %s", seed, exc)
            stats.l2.append(None)
            stats.failures[seed] = f"{type(exc).__name__}: {exc}"
        stats.times.append(time.perf_counter() - t0)
    summary = {"case": cfg.case, **stats.as_dict(), "reports": {str(k): v for k, v in reports.items()}}
    with open(root / "sweep_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return stats, summary


def verify(case_ids, samples_per_law=200, n_probes=200, echo=print) -> bool:
    """Consistency oracle for each case plus the derivative probe suite."""
    ok = True
    failed, worst, first = derivative_probe_suite(n_probes)
    if failed:
        echo(f"FAIL derivatives: {failed}/{n_probes} probes off; first at {first}")
        ok = False
    else:
        echo(f"PASS derivatives: {n_probes} probes, worst relative error {worst:.2e}")
    for cid in case_ids:
        try:
            r = verify_case_consistency(get_case(cid), samples_per_law)
            echo(f"PASS case {cid}: max |lhs - rhs| = {r:.2e}")
        except CaseConsistencyError as exc:
            echo(f"FAIL case {cid}: {exc}")
            ok = False
    return ok
