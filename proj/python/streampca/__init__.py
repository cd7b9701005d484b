"""Streaming single-eigenvector estimators (Krasulina, Oja, CCIPCA)."""

import json as _json

from . import _streampca
from ._streampca import (
    CovarianceModel,
    Schedule,
    State,
    StreamPcaError,
    alignment_loss,
    build_fixed_dataset,
    ccipca_step,
    f_value,
    fit_rate_slope,
    fourth_moment_gaussian,
    krasulina_step_max,
    krasulina_step_min,
    krasulina_xi,
    make_covariance,
    oja_step,
    sample_covariance,
    sym_eigen,
    theoretical_bound,
)


def run_experiment(config):
    """Run a replicated experiment from a config dict (same keys as the CLI).

    Returns the summary document with an extra "curve" list.
    """
    return _json.loads(_streampca._run_experiment_json(_json.dumps(config)))


__all__ = [
    "CovarianceModel",
    "Schedule",
    "State",
    "StreamPcaError",
    "alignment_loss",
    "build_fixed_dataset",
    "ccipca_step",
    "f_value",
    "fit_rate_slope",
    "fourth_moment_gaussian",
    "krasulina_step_max",
    "krasulina_step_min",
    "krasulina_xi",
    "make_covariance",
    "oja_step",
    "run_experiment",
    "sample_covariance",
    "sym_eigen",
    "theoretical_bound",
]
