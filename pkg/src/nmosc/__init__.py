"""Exact reduced dynamics of an oscillator in a bosonic bath.

Green's function, time-local master-equation coefficients, and the bound
state analysis that decides when the long-time dynamics is dissipationless.
"""
from .bound_state import (GapPole, Pole, QbmBath, QbmReport, StabilityReport,
                          discrete_bound_energy, gap_pole, negative_pole,
                          qbm_stability, stability_report)
from .coefficients import (CoefficientTrajectory, compute_coefficients,
                           compute_xi, mean_occupation)
from .kernels import BathKernels, dissipation_kernel, noise_kernel
from .propagator import PropagatorTrajectory, long_time_behavior, solve_u
from .spectral import (BandGap, Discrete, DiscreteBath, PowerLawExpCutoff,
                       Tabulated, discretize, evaluate, frequency_shift)

__version__ = "0.1.0"

__all__ = [
    "BandGap", "BathKernels", "CoefficientTrajectory", "Discrete", "DiscreteBath",
    "GapPole", "Pole", "PowerLawExpCutoff", "PropagatorTrajectory", "QbmBath",
    "QbmReport", "StabilityReport", "Tabulated", "compute_coefficients",
    "compute_xi", "discrete_bound_energy", "discretize", "dissipation_kernel",
    "evaluate", "frequency_shift", "gap_pole", "long_time_behavior",
    "mean_occupation", "negative_pole", "noise_kernel", "qbm_stability",
    "solve_u", "stability_report",
]
