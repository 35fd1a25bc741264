"""Null space property certificates, robustness probes, recovery and width estimates."""

from ._nsplab import (
    Measure,
    Subspace,
    check_properties,
    compare_measures,
    delta_threshold,
    gordon_bound,
    grassmann_distance,
    mc_probability,
    nsc,
    nsp_check,
    null_space,
    recover,
    rrc_probe,
    run_suite,
    rv_bound,
    sample_haar,
    tradeoff,
    tradeoff_delta,
    verify_counterexample1,
    width,
    zeta,
)

__all__ = [
    "Measure",
    "Subspace",
    "check_properties",
    "compare_measures",
    "delta_threshold",
    "gordon_bound",
    "grassmann_distance",
    "mc_probability",
    "nsc",
    "nsp_check",
    "null_space",
    "recover",
    "rrc_probe",
    "run_suite",
    "rv_bound",
    "sample_haar",
    "tradeoff",
    "tradeoff_delta",
    "verify_counterexample1",
    "width",
    "zeta",
]
