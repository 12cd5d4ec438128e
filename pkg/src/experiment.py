"""
🧪 Experiment - seeded Monte-Carlo trials, parameter sweeps, CSV output
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .config import settings
from .errors import InvalidArgumentError
from .models import (
    BaselineCrossover,
    Method,
    ScenarioConfig,
    SolverSettings,
    SweepResult,
    SweepRow,
    SweepVariable,
    TrialResult,
    linear_to_db,
)
from .passive import rayleigh_aic_ratio
from .workflows import TrialWorkflow

# greedy 와 기존 massive MIMO 곡선이 만나야 하는 M 구간
CROSSOVER_BAND = (130.0, 520.0)

CSV_COLUMNS = [
    "sweep_var", "value", "method", "min_sinr_db_mean", "min_sinr_db_std",
    "trials", "seed"
]


def run_trial(config: ScenarioConfig,
              trial_index: int,
              solver: Optional[SolverSettings] = None) -> TrialResult:
    """One trial, channels drawn from (master_seed, trial_index) only"""
    return TrialWorkflow(config, solver).run(trial_index)


def _summarize(values_db: Sequence[float]) -> tuple[float, float]:
    finite = np.asarray(values_db, dtype=float)
    finite = finite[np.isfinite(finite)]
    if finite.size == 0:
        return float("nan"), float("nan")
    return float(finite.mean()), float(finite.std())


def sweep(config: ScenarioConfig,
          variable: SweepVariable,
          values: Sequence[float],
          trials: Optional[int] = None,
          workers: Optional[int] = None,
          solver: Optional[SolverSettings] = None,
          on_trial: Optional[Callable[[TrialResult], None]] = None
          ) -> SweepResult:
    """Paired sweep: trial i uses the same seed at every value

    Trials run on a thread pool; results are collected in trial order, so the
    output does not depend on the worker count.
    """
    variable = SweepVariable(variable)
    values = [float(v) for v in values]
    if not values:
        raise InvalidArgumentError("sweep needs at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidArgumentError(f"sweep values must increase: {values}")
    trials = trials or config.trials
    workers = workers or settings.experiment.workers

    # 범위 오류는 첫 trial 전에
    configs = [config.with_sweep_value(variable, value) for value in values]

    rows: list[SweepRow] = []
    per_value: list[list[TrialResult]] = []
    for value, value_config in zip(values, configs):
        workflow = TrialWorkflow(value_config, solver)

        def run_one(index: int) -> TrialResult:
            result = workflow.run(index)
            if on_trial:
                on_trial(result)
            return result

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, range(trials)))
        per_value.append(results)

        for method in (m for m in Method if m in config.methods):
            mean, std = _summarize(
                [linear_to_db(r.min_sinr.get(method, math.nan)) for r in results])
            rows.append(
                SweepRow(sweep_var=variable.value,
                         value=value,
                         method=method,
                         min_sinr_db_mean=mean,
                         min_sinr_db_std=std,
                         trials=trials,
                         seed=config.master_seed))

    return SweepResult(variable=variable,
                       values=values,
                       methods=[m for m in Method if m in config.methods],
                       trials=trials,
                       seed=config.master_seed,
                       rows=rows,
                       trial_results=per_value)


def write_csv(result: SweepResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in result.rows:
            writer.writerow({**row.model_dump(), "method": row.method.value})
    return path


# ─────────────────────────────────────────────
# Readouts
# ─────────────────────────────────────────────


def doubling_gaps(result: SweepResult, method: Method) -> list[float]:
    """Mean-dB gain per doubling of the swept value, between adjacent values"""
    means = result.mean_db(method)
    return [(b - a) / math.log2(vb / va)
            for a, b, va, vb in zip(means, means[1:], result.values,
                                    result.values[1:])]


def mean_doubling_gap(result: SweepResult, method: Method) -> float:
    """Average gain per doubling from the first to the last value"""
    means = result.mean_db(method)
    if len(means) < 2:
        raise InvalidArgumentError("need at least two sweep values")
    return (means[-1] - means[0]) / math.log2(
        result.values[-1] / result.values[0])


def crossover(result: SweepResult, method_a: Method,
              method_b: Method) -> Optional[float]:
    """First sweep value where the mean curves of a and b cross (linear interpolation)"""
    diff = np.subtract(result.mean_db(method_a), result.mean_db(method_b))
    values = result.values
    for i in range(len(values) - 1):
        left, right = diff[i], diff[i + 1]
        if not (np.isfinite(left) and np.isfinite(right)):
            continue
        if left == 0:
            return values[i]
        if left * right < 0:
            return values[i] + (values[i + 1] - values[i]) * left / (left -
                                                                      right)
    if len(diff) and diff[-1] == 0:
        return values[-1]
    return None


def aic_decay(elements: Sequence[int], draws: int,
              seed: int) -> list[tuple[int, float]]:
    """Rayleigh cross-gain ratio for each M (one child stream per M)"""
    streams = np.random.SeedSequence(seed).spawn(len(elements))
    return [(int(m), rayleigh_aic_ratio(int(m), draws,
                                        np.random.default_rng(s)))
            for m, s in zip(elements, streams)]


def baseline_crossover(config: ScenarioConfig,
                       values: Sequence[float],
                       trials: Optional[int] = None,
                       workers: Optional[int] = None,
                       solver: Optional[SolverSettings] = None,
                       method: Method = Method.GREEDY,
                       on_trial: Optional[Callable[[TrialResult], None]] = None
                       ) -> BaselineCrossover:
    """M sweep of `method` against the baseline, literal and per-path normalized

    Both sweeps share seeds, so only the baseline curve moves between modes.
    """
    found: dict[bool, Optional[float]] = {}
    for per_path in (False, True):
        mode_config = ScenarioConfig.model_validate({
            **config.model_dump(),
            "baseline_per_path_normalization": per_path,
            "methods": [method, Method.CONVENTIONAL],
        })
        result = sweep(mode_config,
                       SweepVariable.M,
                       values,
                       trials=trials,
                       workers=workers,
                       solver=solver,
                       on_trial=on_trial)
        found[per_path] = crossover(result, method, Method.CONVENTIONAL)
    return BaselineCrossover(method=method,
                             values=[float(v) for v in values],
                             trials=trials or config.trials,
                             band=CROSSOVER_BAND,
                             literal=found[False],
                             per_path=found[True])
