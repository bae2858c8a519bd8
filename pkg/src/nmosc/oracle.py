"""Brute-force ground truth for discrete-bath models.

Everything here works directly with the Hamiltonian matrices: the
single-excitation arrowhead matrix, the n-excitation sectors of the full
quadratic Hamiltonian, and the potential-energy matrix of the coupled
oscillator model. Nothing here calls the time stepper or the root finders.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DimensionError, DomainError
from .propagator import PropagatorTrajectory
from .spectral import DiscreteBath, bose


def single_excitation_matrix(bath: DiscreteBath, Omega: float) -> np.ndarray:
    """Arrowhead matrix: system on index 0, mode k on index k."""
    w, lam = bath.arrays()
    K = w.size
    H = np.zeros((K + 1, K + 1))
    H[0, 0] = Omega
    H[np.arange(1, K + 1), np.arange(1, K + 1)] = w
    H[0, 1:] = lam
    H[1:, 0] = lam
    return H


def exact_u(bath: DiscreteBath, Omega: float, times) -> PropagatorTrajectory:
    """``u(t) = sum_j |V[0, j]|**2 exp(-i E_j t)`` from exact diagonalization."""
    times = np.asarray(times, dtype=float)
    E, V = np.linalg.eigh(single_excitation_matrix(bath, Omega))
    weight = np.abs(V[0]) ** 2
    phase = np.exp(-1j * np.outer(times, E))
    u = phase @ weight
    du = phase @ (-1j * E * weight)
    step = float(times[1] - times[0]) if times.size > 1 else 0.0
    return PropagatorTrajectory(times, u, du, step)


def evolve_state(bath: DiscreteBath, Omega: float, times) -> np.ndarray:
    """Single-excitation state ``exp(-iHt)|s>`` for each time (rows)."""
    E, V = np.linalg.eigh(single_excitation_matrix(bath, Omega))
    coef = V[0].conj()
    phase = np.exp(-1j * np.outer(np.asarray(times, dtype=float), E))
    return (phase * coef) @ V.T


def bound_state_eigen(bath: DiscreteBath, Omega: float) -> tuple[float, float]:
    """Lowest single-excitation eigenvalue and the squared system overlap of its eigenvector."""
    E, V = np.linalg.eigh(single_excitation_matrix(bath, Omega))
    return float(E[0]), float(abs(V[0, 0]) ** 2)


def _sector_basis(n_modes: int, n: int) -> list[tuple[int, ...]]:
    """Occupation vectors with ``sum == n`` in lexicographic order."""
    basis = []
    for combo in itertools.combinations_with_replacement(range(n_modes), n):
        occ = [0] * n_modes
        for i in combo:
            occ[i] += 1
        basis.append(tuple(occ))
    return sorted(basis)


def sector_hamiltonian(h: np.ndarray, n: int):
    """Matrix of ``sum_ij h_ij a_i^dag a_j`` in the n-excitation sector."""
    m = h.shape[0]
    basis = _sector_basis(m, n)
    index = {occ: i for i, occ in enumerate(basis)}
    H = np.zeros((len(basis), len(basis)))
    for col, occ in enumerate(basis):
        for j in range(m):
            if occ[j] == 0:
                continue
            for i in range(m):
                if h[i, j] == 0:
                    continue
                if i == j:
                    H[col, col] += h[i, i] * occ[i]
                    continue
                new = list(occ)
                new[j] -= 1
                new[i] += 1
                amp = math.sqrt(occ[j] * (occ[i] + 1))
                H[index[tuple(new)], col] += h[i, j] * amp
    return H, basis


def _power_state(c: np.ndarray, basis, n: int) -> np.ndarray:
    """Normalized ``(sum_i c_i a_i^dag)**n |0>`` in the sector basis."""
    v = np.zeros(len(basis))
    for k, occ in enumerate(basis):
        amp = math.factorial(n)
        for ci, mi in zip(c, occ):
            amp *= ci ** mi / math.sqrt(math.factorial(mi))
        v[k] = amp
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class LadderLevel:
    n: int
    dimension: int
    target: float
    residual: float
    spectrum_min: float
    distance_to_spectrum: float

    @property
    def passed(self) -> bool:
        return self.residual < 1e-10 and self.distance_to_spectrum < 1e-10


@dataclass(frozen=True)
class LadderReport:
    single_energy: float
    levels: tuple[LadderLevel, ...]

    @property
    def passed(self) -> bool:
        return all(lv.passed for lv in self.levels)


def ladder_check(bath: DiscreteBath, Omega: float, n_max: int = 3) -> LadderReport:
    """Check that ``(C^dag)**n |0>`` is an eigenvector with eigenvalue ``n*E``.

    ``C^dag`` is built from the lowest single-excitation eigenvector.
    """
    if bath.size > 6:
        raise DimensionError(f"ladder check limited to K <= 6 modes, got {bath.size}")
    if not 1 <= n_max <= 3:
        raise DomainError("n_max must be 1, 2 or 3")
    h = single_excitation_matrix(bath, Omega)
    E, V = np.linalg.eigh(h)
    c = V[:, 0]
    levels = []
    for n in range(1, n_max + 1):
        H, basis = sector_hamiltonian(h, n)
        vec = _power_state(c, basis, n)
        target = n * E[0]
        residual = float(np.linalg.norm(H @ vec - target * vec))
        spec = np.linalg.eigvalsh(H)
        levels.append(LadderLevel(n, len(basis), float(target), residual,
                                  float(spec[0]), float(np.min(np.abs(spec - target)))))
    return LadderReport(float(E[0]), tuple(levels))


def exact_xi_discrete(bath: DiscreteBath, temperature: float,
                      traj: PropagatorTrajectory) -> np.ndarray:
    """``sum_k lambda_k**2 nbar_k |int_0^t u(tau) exp(i w_k tau) dtau|**2``."""
    out = np.zeros(len(traj.times))
    if temperature == 0:
        return out
    for wk, lk in zip(bath.omega, bath.coupling):
        f = traj.u * np.exp(1j * wk * traj.times)
        I = integrate.cumulative_trapezoid(f, traj.times, initial=0.0)
        out += lk * lk * float(bose(wk, temperature)) * np.abs(I) ** 2
    return out


@dataclass(frozen=True)
class HessianCheck:
    min_eigenvalue: float
    schur_complement: float
    positive_semidefinite: bool

    @property
    def consistent(self) -> bool:
        eig_psd = self.min_eigenvalue >= -1e-12 * max(1.0, abs(self.schur_complement))
        return eig_psd == self.positive_semidefinite


def potential_matrix(kappa: float, masses, omegas, couplings) -> np.ndarray:
    """``A`` with ``V = y^T A y / 2`` for ``y = (x, q_1, ..., q_K)``."""
    m = np.asarray(masses, dtype=float)
    w = np.asarray(omegas, dtype=float)
    c = np.asarray(couplings, dtype=float)
    K = m.size
    A = np.zeros((K + 1, K + 1))
    A[0, 0] = kappa
    A[0, 1:] = c
    A[1:, 0] = c
    A[np.arange(1, K + 1), np.arange(1, K + 1)] = m * w ** 2
    return A


def qbm_hessian_check(kappa: float, masses, omegas, couplings) -> HessianCheck:
    """Definiteness of the coupled-oscillator potential.

    The Schur complement of the bath block is the primary verdict; the
    minimum eigenvalue is reported as a cross-check.
    """
    m = np.asarray(masses, dtype=float)
    w = np.asarray(omegas, dtype=float)
    if np.any(m <= 0) or np.any(w <= 0):
        raise DomainError("masses and frequencies must be positive")
    A = potential_matrix(kappa, m, w, couplings)
    bath_block = A[1:, 1:]
    off = A[0, 1:]
    schur = float(A[0, 0] - off @ np.linalg.solve(bath_block, off)) if off.size else float(A[0, 0])
    return HessianCheck(float(np.linalg.eigvalsh(A)[0]), schur, schur >= 0)
