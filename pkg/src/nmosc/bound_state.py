"""Bound states, imaginary Laplace poles and the stability verdict.

Below the continuum the pole condition reads, with ``x = |omega0|``,

    g(x) = Omega + x - int_0^inf J(w) / (w + x) dw = 0.

``g`` increases strictly from ``g(0) = Omega + dOmega`` to infinity, so a
root exists exactly when the margin ``Omega + dOmega`` is negative. In that
regime the single-excitation energy ``E = omega0`` is negative and the
total Hamiltonian has the ladder ``n*E``: it is unbounded from below.
Inside a spectral gap the analogous condition is
``x - Omega - int J(w)/(x - w) dw = 0`` with ``x`` in the gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError
from .spectral import (BandGap, Discrete, DiscreteBath, SpectralDensity,
                       frequency_shift, integrate_density,
                       upper_cutoff)

MAX_ITER = 200
GAP_SCAN_CELLS = 256


@dataclass(frozen=True)
class Pole:
    omega0: float
    residue: float


@dataclass(frozen=True)
class GapPole(Pole):
    roots: tuple[float, ...] = ()


@dataclass(frozen=True)
class StabilityReport:
    Omega: float
    delta_omega: float
    margin: float
    unbounded: bool
    pole: Optional[Pole]
    discrete_energy: Optional[float] = None
    gap_pole: Optional[GapPole] = None

    def as_dict(self) -> dict:
        d = {
            "Omega": self.Omega,
            "delta_omega": self.delta_omega,
            "margin": self.margin,
            "unbounded": self.unbounded,
            "omega0": None if self.pole is None else self.pole.omega0,
            "residue_r": None if self.pole is None else self.pole.residue,
            "discrete_energy": self.discrete_energy,
        }
        if self.gap_pole is not None:
            d["gap_roots"] = list(self.gap_pole.roots)
        return d


@dataclass(frozen=True)
class QbmBath:
    masses: tuple[float, ...]
    omegas: tuple[float, ...]
    couplings: tuple[float, ...]

    def __post_init__(self):
        for name in ("masses", "omegas", "couplings"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if not len(self.masses) == len(self.omegas) == len(self.couplings):
            raise DomainError("masses, omegas and couplings must have equal length")
        if any(m <= 0 for m in self.masses) or any(w <= 0 for w in self.omegas):
            raise DomainError("masses and frequencies must be positive")

    @classmethod
    def from_modes(cls, modes: Sequence[tuple[float, float, float]]) -> "QbmBath":
        modes = list(modes)
        return cls(tuple(m[0] for m in modes), tuple(m[1] for m in modes),
                   tuple(m[2] for m in modes))


@dataclass(frozen=True)
class QbmReport:
    kappa: float
    delta_kappa: float
    kappa_R: float
    unstable: bool
    # the shift formula is written with the interaction couplings c_k
    interpretation: str = field(default="delta_kappa = -sum_k c_k^2 / (m_k omega_k^2), "
                                        "c_k being the x*q_k couplings")

    def as_dict(self) -> dict:
        return {"kappa": self.kappa, "delta_kappa": self.delta_kappa,
                "kappa_R": self.kappa_R, "unstable": self.unstable,
                "interpretation": self.interpretation}


def _bisect(f: Callable[[float], float], lo: float, hi: float, f_lo: float,
            tol: float) -> float:
    """Root of ``f`` in ``[lo, hi]`` given ``f(lo)`` and ``f(hi)`` of opposite sign."""
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        f_mid = f(mid)
        if abs(f_mid) < tol:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not converge in {MAX_ITER} iterations")


def pole_function(J: SpectralDensity, Omega: float, x: float) -> float:
    """``g(x) = Omega + x - int J(w)/(w + x) dw`` for ``x >= 0``."""
    if x == 0:
        return Omega + frequency_shift(J)
    return Omega + x - integrate_density(J, lambda w: 1.0 / (w + x), points=(x,))


def _residue_below(J: SpectralDensity, x: float) -> float:
    return 1.0 / (1.0 + integrate_density(J, lambda w: 1.0 / (w + x) ** 2, points=(x,)))


def negative_pole(J: SpectralDensity, Omega: float) -> Optional[Pole]:
    """Bound state below the continuum, or ``None`` when ``Omega + dOmega >= 0``."""
    margin = Omega + frequency_shift(J)
    if not margin < 0:
        return None
    tol = 1e-12 * max(1.0, abs(Omega))
    hi = -margin
    # int J/(w+x) <= -dOmega, hence g(x) >= margin + x and g(-margin) >= 0
    g_hi = pole_function(J, Omega, hi)
    if g_hi == 0:
        x = hi
    else:
        x = _bisect(lambda y: pole_function(J, Omega, y), 0.0, hi, margin, tol)
    return Pole(-float(x), _residue_below(J, x))


def _edge_points(J: BandGap, x: float) -> list[float]:
    """Geometric break points resolving ``1/(x - w)`` when ``x`` nears a gap edge."""
    top = upper_cutoff(J)
    pts = []
    d = x - J.lo
    while d < J.lo:
        pts.append(J.lo - d)
        d *= 10.0
    d = J.hi - x
    while J.hi + d < top:
        pts.append(J.hi + d)
        d *= 10.0
    return pts


def _gap_function(J: BandGap, Omega: float, x: float) -> float:
    return x - Omega - integrate_density(J, lambda w: 1.0 / (x - w), points=_edge_points(J, x))


def gap_pole(J: BandGap, Omega: float) -> Optional[GapPole]:
    """Real pole inside the spectral gap, closest to ``Omega`` if several exist."""
    if not isinstance(J, BandGap):
        raise DomainError("gap_pole needs a BandGap spectral density")
    lo, hi = J.lo, J.hi
    nudge = 1e-9 * (hi - lo)
    xs = np.linspace(lo, hi, GAP_SCAN_CELLS + 1)
    xs[0] += nudge
    xs[-1] -= nudge
    vals = [_gap_function(J, Omega, float(x)) for x in xs]
    tol = 1e-12 * max(1.0, abs(Omega))
    roots = []
    for a, b, fa, fb in zip(xs, xs[1:], vals, vals[1:]):
        if fa == 0:
            roots.append(float(a))
        elif (fa < 0) != (fb < 0) and fb != 0:
            roots.append(_bisect(lambda y: _gap_function(J, Omega, y), float(a), float(b), fa, tol))
    if vals[-1] == 0:
        roots.append(float(xs[-1]))
    if not roots:
        return None
    best = min(roots, key=lambda r: abs(r - Omega))
    weight = integrate_density(J, lambda w: 1.0 / (best - w) ** 2,
                               points=_edge_points(J, best))
    return GapPole(best, 1.0 / (1.0 + weight), tuple(roots))


def discrete_bound_energy(bath: DiscreteBath, Omega: float) -> Optional[float]:
    """Negative root of ``E = Omega + sum_k lambda_k**2 / (E - w_k)``, if any."""
    w, lam = bath.arrays()
    lam2 = lam ** 2
    shift = float(np.sum(lam2 / w))
    if not Omega - shift < 0:
        return None

    def f(E):
        return E - Omega - float(np.sum(lam2 / (E - w)))
    B = abs(Omega) + shift + 1.0
    return _bisect(f, -B, 0.0, f(-B), 1e-12)


def stability_report(J: SpectralDensity, Omega: float) -> StabilityReport:
    """Frequency shift, margin, poles and the unboundedness verdict."""
    delta = frequency_shift(J)
    margin = Omega + delta
    unbounded = bool(margin < 0)
    neg = negative_pole(J, Omega)
    if (neg is not None) != unbounded:
        raise ConsistencyError(f"pole presence disagrees with margin {margin}")
    energy = None
    if isinstance(J, Discrete):
        energy = discrete_bound_energy(J.bath, Omega)
        if (energy is None) != (neg is None) or (
                energy is not None and not math.isclose(energy, neg.omega0, rel_tol=1e-9, abs_tol=1e-12)):
            raise ConsistencyError("discrete bound energy disagrees with the pole search")
    gp = gap_pole(J, Omega) if isinstance(J, BandGap) else None
    pole = neg if neg is not None else gp
    return StabilityReport(float(Omega), float(delta), float(margin), unbounded, pole, energy, gp)


def qbm_stability(kappa: float, bath: QbmBath) -> QbmReport:
    """Renormalized spring constant ``kappa + dkappa`` of the coupled-oscillator model."""
    m = np.asarray(bath.masses)
    w = np.asarray(bath.omegas)
    c = np.asarray(bath.couplings)
    dk = -float(np.sum(c ** 2 / (m * w ** 2)))
    kr = kappa + dk
    return QbmReport(float(kappa), dk, float(kr), bool(kr < 0))
