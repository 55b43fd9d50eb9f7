"""Dual-backend performance engine for RIS-aided multi-cell NOMA downlink
networks: a stochastic-geometry Monte Carlo simulator, closed-form coverage
and rate analytics, and a harness that cross-validates the two."""

from .analytics import (
    AnalyticResult,
    Thresholds,
    coverage_connected,
    coverage_typical,
    ergodic_connected,
    ergodic_typical,
    laplace_connected,
    laplace_typical_ris,
)
from .channel import ChannelParams, PowerAllocation
from .config import (
    ConfigBundle,
    SweepSpec,
    SystemParameters,
    default_bundle,
    default_system,
    default_thresholds,
    load_config,
    preset,
)
from .geometry import NetworkRealization, SpatialParams, sample_realization
from .simulator import MetricResult, TrialOutcome, estimate_coverage, estimate_ergodic, run_trial

__version__ = "0.1.0"

__all__ = [
    "AnalyticResult",
    "ChannelParams",
    "ConfigBundle",
    "MetricResult",
    "NetworkRealization",
    "PowerAllocation",
    "SpatialParams",
    "SweepSpec",
    "SystemParameters",
    "Thresholds",
    "TrialOutcome",
    "coverage_connected",
    "coverage_typical",
    "default_bundle",
    "default_system",
    "default_thresholds",
    "ergodic_connected",
    "ergodic_typical",
    "estimate_coverage",
    "estimate_ergodic",
    "laplace_connected",
    "laplace_typical_ris",
    "load_config",
    "preset",
    "run_trial",
    "sample_realization",
]
