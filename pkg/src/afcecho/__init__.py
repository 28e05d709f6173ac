"""Atomic frequency comb echo model: efficiency, SNR, fidelity and cloning region."""

__version__ = "0.1.0"

from .comb import CombSpec, Sampled, Square, fourier_a, pe_at, pg_at, reduced_components, square_profile
from .metrics import (
    MetricPoint,
    background_upper_limit,
    efficiency,
    fidelity_from_snr,
    gain_condition,
    metric_point,
    optimal_cloning_fidelity,
    snr,
    zero_background_limits,
)

__all__ = [
    "CombSpec",
    "MetricPoint",
    "Sampled",
    "Square",
    "background_upper_limit",
    "efficiency",
    "fidelity_from_snr",
    "fourier_a",
    "gain_condition",
    "metric_point",
    "optimal_cloning_fidelity",
    "pe_at",
    "pg_at",
    "reduced_components",
    "snr",
    "square_profile",
    "zero_background_limits",
]
