"""Fog-computing co-simulator with surrogate-driven schedulers."""

from ._gosh import (
    compare,
    gen_dataset,
    objective_score,
    run_all_seeds,
    run_experiment,
    scheduler_names,
    sweep_k,
    train,
    update_exploration,
    value_at_risk,
)

__all__ = [
    "compare",
    "gen_dataset",
    "objective_score",
    "run_all_seeds",
    "run_experiment",
    "scheduler_names",
    "sweep_k",
    "train",
    "update_exploration",
    "value_at_risk",
]
