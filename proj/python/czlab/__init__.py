"""Random dyadic grids, Haar shifts and Monte Carlo estimates of their averaged kernels."""

import json

from ._core import (
    Error,
    GridShift,
    ScaleWindow,
    ShiftFamilySpec,
    boundary_probability,
    canonical_config,
    complexity_tail,
    cube_at,
    kernel_omega,
    lambda_value,
    report_csv,
    size_bound,
    spec_digest,
    truncation_tail_bound,
    window_constant,
)
from ._core import estimate_kernel as _estimate_kernel
from ._core import run as _run


def estimate_kernel(x, y, spec, window, n_samples, seed=1, threads=1):
    """Mean, stderr and truncation bound of K(x, y); points in base units."""
    return json.loads(_estimate_kernel(x, y, spec, window, n_samples, seed, threads))


def run(config="", **overrides):
    """Run an experiment from config text plus keyword overrides; returns the JSON report."""
    lines = [config] + [f"{k} = {v}" for k, v in overrides.items()]
    return json.loads(_run("\n".join(lines)))


__all__ = [
    "Error",
    "GridShift",
    "ScaleWindow",
    "ShiftFamilySpec",
    "boundary_probability",
    "canonical_config",
    "complexity_tail",
    "cube_at",
    "estimate_kernel",
    "kernel_omega",
    "lambda_value",
    "report_csv",
    "run",
    "size_bound",
    "spec_digest",
    "truncation_tail_bound",
    "window_constant",
]
