"""Time-local master-equation coefficients from the Green's function.

    i*Omega_t(t) + gamma(t) = -du/dt / u
    gamma(t)*n_t(t)         = xi'(t)/2 + gamma(t)*xi(t)
    xi(t) = int_0^t int_0^t u(tau) nu(s - tau) u(s)^* ds dtau

``xi`` is accumulated in its spectral form
``sum_j m_j |I_j(t)|**2`` with ``I_j(t) = int_0^t u(tau) exp(-i w_j tau) dtau``
(trapezoid in tau), which is manifestly nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridMismatchError
from .kernels import BathKernels
from .propagator import PropagatorTrajectory

VALID_THRESHOLD = 1e-8
_RESYNC = 256  # steps between exact phase recomputations


@dataclass
class CoefficientTrajectory:
    times: np.ndarray
    omega_tilde: np.ndarray
    gamma: np.ndarray
    xi: np.ndarray
    xi_dot: np.ndarray
    gamma_n: np.ndarray
    valid_mask: np.ndarray


@dataclass
class Occupation:
    closed_form: np.ndarray
    integrated: np.ndarray
    max_deviation: float


def compute_xi(traj: PropagatorTrajectory, kernels: BathKernels) -> tuple[np.ndarray, np.ndarray]:
    """``xi(t)`` and its derivative on the trajectory grid.

    ``xi(t) = int dw J(w) nbar(w) |I_w(t)|**2`` with
    ``I_w(t) = int_0^t u(tau) exp(i w tau) dtau``, the bath part of the
    occupation grown from the vacuum. The derivative is
    ``2 Re[u^*(t) int_0^t nu(tau - t) u(tau) dtau]`` with the noise kernel
    expanded on the same frequency rule, i.e. the exact time derivative of the
    accumulated spectral sum.
    """
    if abs(traj.step - kernels.step) > 1e-12 * traj.step or traj.n_steps > kernels.n_steps:
        raise GridMismatchError(
            f"trajectory (step {traj.step}, {traj.n_steps} steps) does not fit kernel grid "
            f"(step {kernels.step}, {kernels.n_steps} steps)")
    n = traj.n_steps
    xi = np.zeros(n + 1)
    xi_dot = np.zeros(n + 1)
    w, mass = kernels.noise_nodes
    if w.size == 0:
        return xi, xi_dot
    h = traj.step
    u = traj.u
    acc = np.zeros(w.size, dtype=complex)
    rot = np.exp(1j * w * h)
    prev = np.ones(w.size, dtype=complex)
    for k in range(1, n + 1):
        cur = np.exp(1j * w * traj.times[k]) if k % _RESYNC == 0 else prev * rot
        acc += 0.5 * h * (u[k - 1] * prev + u[k] * cur)
        xi[k] = np.dot(mass, acc.real ** 2 + acc.imag ** 2)
        xi_dot[k] = 2.0 * (np.conj(u[k]) * np.dot(mass, np.conj(cur) * acc)).real
        prev = cur
    return xi, xi_dot


def compute_coefficients(traj: PropagatorTrajectory, xi: np.ndarray,
                         xi_dot: np.ndarray) -> CoefficientTrajectory:
    """Renormalized frequency, damping rate and diffusion coefficient.

    Samples with ``|u| < 1e-8`` are masked (NaN) instead of raising: the
    coefficients of an exact time-local equation genuinely diverge at zeros
    of ``u``.
    """
    xi = np.asarray(xi, dtype=float)
    xi_dot = np.asarray(xi_dot, dtype=float)
    if xi.shape != traj.u.shape or xi_dot.shape != traj.u.shape:
        raise GridMismatchError("xi samples do not match the trajectory grid")
    valid = np.abs(traj.u) >= VALID_THRESHOLD
    ratio = np.full(traj.u.shape, complex(np.nan, np.nan))
    ratio[valid] = traj.u_dot[valid] / traj.u[valid]
    gamma = -ratio.real
    omega_t = -ratio.imag
    gamma_n = 0.5 * xi_dot + gamma * xi
    return CoefficientTrajectory(traj.times, omega_t, gamma, xi, xi_dot, gamma_n, valid)


def _integrate_moment(times, gamma, gamma_n, start: float, valid) -> np.ndarray:
    """Trapezoidal solution of ``dn/dt = -2 gamma n + 2 gamma_n`` on the grid.

    The equation is linear, so each implicit trapezoid step is solved exactly.
    Integration restarts from ``start_values`` after masked samples.
    """
    out = np.full(times.shape, np.nan)
    out[0] = start[0]
    for k in range(len(times) - 1):
        if not (valid[k] and valid[k + 1]):
            if valid[k + 1]:
                out[k + 1] = start[k + 1]
            continue
        if np.isnan(out[k]):
            out[k] = start[k]
        h = times[k + 1] - times[k]
        a0, a1 = -2.0 * gamma[k], -2.0 * gamma[k + 1]
        b0, b1 = 2.0 * gamma_n[k], 2.0 * gamma_n[k + 1]
        out[k + 1] = (out[k] * (1 + 0.5 * h * a0) + 0.5 * h * (b0 + b1)) / (1 - 0.5 * h * a1)
    return out


def mean_occupation(traj: PropagatorTrajectory, coeffs: CoefficientTrajectory,
                    n0: float) -> Occupation:
    """Mean occupation from the closed form ``|u|**2 n0 + xi`` and from the moment equation."""
    if n0 < 0:
        raise DomainError("initial occupation must be >= 0")
    closed = np.abs(traj.u) ** 2 * n0 + coeffs.xi
    integrated = _integrate_moment(coeffs.times, coeffs.gamma, coeffs.gamma_n,
                                   closed, coeffs.valid_mask)
    ok = coeffs.valid_mask & ~np.isnan(integrated)
    dev = float(np.max(np.abs(closed[ok] - integrated[ok]))) if np.any(ok) else 0.0
    return Occupation(closed, integrated, dev)
