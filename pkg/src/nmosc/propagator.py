"""Green's function of the damped oscillator.

Solves

    du/dt + i*Omega*u(t) + int_0^t eta(t - s) u(s) ds = 0,   u(0) = 1,

on a uniform grid. The free rotation is factored out exactly,
``u(t) = exp(-i*Omega*t) v(t)``, and ``v`` is advanced with the trapezoidal
rule in time and trapezoidal product integration for the memory term. The
memory sum is the same trapezoid sum over ``eta(t - s) u(s)`` as in the
original variables, so ``du/dt`` still follows from the equation itself,
while free evolution (``eta == 0``) is reproduced exactly. The implicit
relation for ``v[n+1]`` is linear and is solved in closed form, so each
step costs one dot product over the history (O(N**2) overall).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError, StepSizeError
from .kernels import BathKernels


@dataclass
class PropagatorTrajectory:
    times: np.ndarray
    u: np.ndarray
    u_dot: np.ndarray
    step: float

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class LongTimeBehavior:
    plateau_modulus: float
    rotation_frequency: float
    is_dissipationless: bool
    modulus_spread: float


def solve_u(kernels: BathKernels, Omega: float, horizon: float, step: float) -> PropagatorTrajectory:
    """Integrate the Green's function up to ``horizon`` with step ``step``."""
    if not step > 0:
        raise DomainError("step must be > 0")
    n = int(round(horizon / step))
    if n < 1 or abs(n * step - horizon) > 1e-9 * max(1.0, horizon):
        raise DomainError(f"horizon {horizon} is not a positive integer multiple of step {step}")
    if abs(step - kernels.step) > 1e-12 * step:
        raise DomainError(f"kernel cache built for step {kernels.step}, solver asked for {step}")
    if n > kernels.n_steps:
        raise DomainError(f"kernel cache covers {kernels.n_steps} lags, need {n}")

    h = step
    times = h * np.arange(n + 1)
    eta = kernels.eta_values[: n + 1]
    rot = np.exp(1j * Omega * times)
    # kernel seen in the rotating frame; reversed so history sums are contiguous slices
    eta_rot = eta * rot
    eta_rev = np.ascontiguousarray(eta_rot[::-1])
    denom = 1.0 + 0.25 * h * h * eta[0]
    if abs(denom) < 1e-12:
        raise StepSizeError(f"degenerate implicit step (|denominator| = {abs(denom):.3g})")

    v = np.zeros(n + 1, dtype=complex)
    dv = np.zeros(n + 1, dtype=complex)
    v[0] = 1.0
    for k in range(n):
        # memory at t_{k+1} without the v[k+1] endpoint term
        hist = 0.5 * eta_rot[k + 1] * v[0]
        if k:
            hist += np.dot(eta_rev[n - k: n], v[1: k + 1])
        hist *= h
        v[k + 1] = (v[k] + 0.5 * h * dv[k] - 0.5 * h * hist) / denom
        dv[k + 1] = -hist - 0.5 * h * eta[0] * v[k + 1]
    u = v / rot
    du = -1j * Omega * u + dv / rot
    return PropagatorTrajectory(times, u, du, h)


def long_time_behavior(traj: PropagatorTrajectory, window: float = 0.25) -> LongTimeBehavior:
    """Plateau modulus and rotation frequency of ``u`` over the final ``window`` fraction."""
    if not 0 < window < 1:
        raise DomainError("window must lie in (0, 1)")
    n_tail = int(np.floor(window * len(traj.times)))
    if n_tail < 100:
        raise InsufficientDataError(f"tail window holds {n_tail} samples, need >= 100")
    t = traj.times[-n_tail:]
    u = traj.u[-n_tail:]
    mod = np.abs(u)
    r = float(np.mean(mod))
    spread = float(np.std(mod))
    phase = np.unwrap(np.angle(u))
    slope = np.polyfit(t - t[0], phase, 1)[0]
    return LongTimeBehavior(
        plateau_modulus=r,
        rotation_frequency=float(-slope),
        is_dissipationless=bool(spread < 1e-3 * r and r > 1e-3),
        modulus_spread=spread,
    )
