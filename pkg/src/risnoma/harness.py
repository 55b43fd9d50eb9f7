"""Sweep orchestration and CSV emission.

A sweep evaluates the Cartesian product of grid x scenarios x backends x
metrics and writes one CSV row per combination, in a fixed order, with
values printed to 9 significant digits.  Rows for combinations a backend
cannot serve (the closed forms cover only the RIS-aided NOMA scenario)
carry a non-ok status instead of aborting the sweep.

Grid points fan out over a thread pool sized by the RISNOMA_THREADS
environment variable (default 1); results are written in grid order
regardless of completion order, so output is byte-identical for any thread
count and repeated runs.
"""

from __future__ import annotations

import dataclasses
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

from . import analytics as an
from . import simulator as sim
from .analytics import Thresholds
from .config import ConfigBundle, SweepSpec, SystemParameters, dbm_to_watts
from .geometry import default_sim_radius

__all__ = ["CSV_HEADER", "apply_axis", "evaluate_point", "run_sweep", "thread_count"]

CSV_HEADER = ("axis,axis_value,scenario,backend,metric,"
              "estimate,half_width_95,n_trials,master_seed,status")


def thread_count() -> int:
    raw = os.environ.get("RISNOMA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"RISNOMA_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def apply_axis(system: SystemParameters, thresholds: Thresholds, axis: str,
               value: float) -> tuple[SystemParameters, Thresholds]:
    """Rebuild the parameter bundle with one axis value applied."""
    if axis == "snr_dbm":
        return system.with_power(P_b=dbm_to_watts(value)), thresholds
    if axis == "L":
        return system.with_channel(L=value), thresholds
    if axis == "lambda_b":
        return (system.with_spatial(lambda_b=value,
                                    sim_radius=default_sim_radius(value)),
                thresholds)
    if axis == "r_c":
        return system.with_spatial(r_c=value), thresholds
    if axis == "alpha_t":
        return system.with_channel(alpha_t=value), thresholds
    if axis == "threshold":
        return system, dataclasses.replace(
            thresholds, gamma_sic_th=value, gamma_t_th=value, gamma_c_th=value)
    raise ValueError(f"unknown axis {axis!r}")


def _analytic_estimate(system: SystemParameters, thresholds: Thresholds,
                       metric: str) -> float:
    if metric == "coverage_t":
        return an.coverage_typical(system, thresholds).value
    if metric == "coverage_c":
        return an.coverage_connected(system, thresholds).value
    if metric == "rate_t":
        return an.ergodic_typical(system, thresholds).value
    if metric == "rate_c":
        return an.ergodic_connected(system, thresholds).value
    raise ValueError(f"unknown metric {metric!r}")


def evaluate_point(system: SystemParameters, thresholds: Thresholds,
                   scenario: str, backend: str, metric: str,
                   n_trials: int, master_seed: int) -> dict:
    """One sweep cell; failures are reported in the status field."""
    try:
        if backend == "analytic":
            if scenario != "ris_noma":
                return {"estimate": math.nan, "half_width": math.nan,
                        "n_trials": 0, "status": "unsupported-scenario"}
            value = _analytic_estimate(system, thresholds, metric)
            return {"estimate": value, "half_width": 0.0, "n_trials": 0,
                    "status": "ok"}
        if backend == "simulated":
            if metric in ("coverage_t", "coverage_c"):
                res_t, res_c = sim.estimate_coverage(system, thresholds, scenario,
                                                     n_trials, master_seed)
            else:
                res_t, res_c = sim.estimate_ergodic(system, thresholds, scenario,
                                                    n_trials, master_seed)
            res = res_t if metric.endswith("_t") else res_c
            return {"estimate": res.estimate, "half_width": res.half_width_95,
                    "n_trials": res.n_trials, "status": "ok"}
        return {"estimate": math.nan, "half_width": math.nan,
                "n_trials": 0, "status": "unknown-backend"}
    except Exception as exc:  # noqa: BLE001 - point errors become rows
        return {"estimate": math.nan, "half_width": math.nan, "n_trials": 0,
                "status": f"error:{type(exc).__name__}"}


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.9g}"


def run_sweep(bundle: ConfigBundle, timing: bool = False) -> str:
    """Evaluate a sweep and return the CSV document as text.

    Wall-clock comment rows are emitted only on request (``timing=True``)
    so that default output is byte-identical across runs.
    """
    spec = bundle.sweep
    cells = []
    for value in spec.grid:
        for scenario in spec.scenarios:
            for backend in spec.backends:
                for metric in spec.metrics:
                    cells.append((value, scenario, backend, metric))

    def work(cell):
        value, scenario, backend, metric = cell
        system, thresholds = apply_axis(bundle.system, bundle.thresholds,
                                        spec.axis, value)
        return evaluate_point(system, thresholds, scenario, backend, metric,
                              spec.n_trials, spec.master_seed)

    start = time.perf_counter()
    workers = thread_count()
    if workers == 1:
        results = [work(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, cells))
    elapsed = time.perf_counter() - start

    out = io.StringIO()
    out.write("# risnoma sweep v1\n")
    out.write(f"# axis={spec.axis} master_seed={spec.master_seed} "
              f"n_trials={spec.n_trials}\n")
    out.write(CSV_HEADER + "\n")
    n_failed = 0
    for cell, res in zip(cells, results):
        value, scenario, backend, metric = cell
        if res["status"] != "ok":
            n_failed += 1
        out.write(",".join([
            spec.axis, _fmt(float(value)), scenario, backend, metric,
            _fmt(res["estimate"]), _fmt(res["half_width"]),
            str(res["n_trials"]), str(spec.master_seed), res["status"],
        ]) + "\n")
    out.write(f"# cells={len(cells)} non_ok={n_failed}\n")
    if timing:
        out.write(f"# elapsed_s={elapsed:.3f} threads={workers}\n")
    return out.getvalue()
