"""Bath spectral densities J(omega) and the integrals derived from them.

Units: hbar = k_B = 1. Frequencies, energies and temperatures share one unit,
times are measured in its inverse.

Four model families are provided. The first three are continuum densities,
the last wraps an explicit list of bath modes:

* :class:`PowerLawExpCutoff` -- ``alpha * w**s * wc**(1-s) * exp(-w/wc)``
  (``s < 1`` sub-Ohmic, ``s == 1`` Ohmic, ``s > 1`` super-Ohmic);
* :class:`BandGap` -- a continuum density with ``J == 0`` on ``[lo, hi]``;
* :class:`Tabulated` -- linear interpolation of ``(w, J)`` samples, zero
  outside the sampled range;
* :class:`Discrete` -- ``sum_k lambda_k**2 delta(w - w_k)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate, special

from .errors import (AccuracyError, DivergenceError, DomainError,
                     UnsupportedVariantError)

__all__ = [
    "DiscreteBath", "PowerLawExpCutoff", "BandGap", "Tabulated", "Discrete",
    "SpectralDensity", "evaluate", "frequency_shift", "discretize",
    "integrate_density", "upper_cutoff", "breakpoints", "gaps",
    "threshold_exponent", "regular_part", "read_tabulated_csv", "bose",
]


@dataclass(frozen=True)
class DiscreteBath:
    """Finite set of bath modes with frequencies ``omega`` and couplings ``coupling``."""

    omega: tuple[float, ...]
    coupling: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.omega)
        lam = tuple(float(x) for x in self.coupling)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "coupling", lam)
        if len(w) == 0:
            raise DomainError("a discrete bath needs at least one mode")
        if len(w) != len(lam):
            raise DomainError("omega and coupling must have the same length")
        if any(x <= 0 for x in w):
            raise DomainError("mode frequencies must be positive")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise DomainError("mode frequencies must be strictly increasing")
        if any(x <= 0 for x in lam):
            raise DomainError("mode couplings must be positive")

    @classmethod
    def from_modes(cls, modes: Sequence[tuple[float, float]]) -> "DiscreteBath":
        modes = list(modes)
        return cls(tuple(m[0] for m in modes), tuple(m[1] for m in modes))

    @property
    def size(self) -> int:
        return len(self.omega)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.omega), np.asarray(self.coupling)


@dataclass(frozen=True)
class PowerLawExpCutoff:
    alpha: float
    s: float
    omega_c: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.s > 0:
            raise DomainError(f"s must be > 0, got {self.s}")
        if not self.omega_c > 0:
            raise DomainError(f"omega_c must be > 0, got {self.omega_c}")


@dataclass(frozen=True)
class BandGap:
    base: "SpectralDensity"
    lo: float
    hi: float

    def __post_init__(self):
        if isinstance(self.base, Discrete):
            raise UnsupportedVariantError("band gap needs a continuum base density")
        if not 0 < self.lo < self.hi:
            raise DomainError(f"gap must satisfy 0 < lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Tabulated:
    omega: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.omega)
        j = tuple(float(x) for x in self.values)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", j)
        if len(w) < 2 or len(w) != len(j):
            raise DomainError("tabulated density needs >= 2 (omega, J) pairs")
        if w[0] < 0:
            raise DomainError("tabulated frequencies must be >= 0")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise DomainError("tabulated frequencies must be strictly increasing")
        if any(x < 0 for x in j):
            raise DomainError("tabulated J values must be >= 0")


@dataclass(frozen=True)
class Discrete:
    bath: DiscreteBath


SpectralDensity = Union[PowerLawExpCutoff, BandGap, Tabulated, Discrete]
ArrayLike = Union[float, np.ndarray, Sequence[float]]


def bose(omega, temperature: float):
    """Bose occupation ``1/(exp(w/T) - 1)``; identically zero at ``T == 0``."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return np.zeros_like(omega)
    with np.errstate(divide="ignore", over="ignore"):
        return 1.0 / np.expm1(omega / temperature)


def _eval(J, w: np.ndarray) -> np.ndarray:
    if isinstance(J, PowerLawExpCutoff):
        return J.alpha * w ** J.s * J.omega_c ** (1 - J.s) * np.exp(-w / J.omega_c)
    if isinstance(J, BandGap):
        out = _eval(J.base, w)
        return np.where((w >= J.lo) & (w <= J.hi), 0.0, out)
    if isinstance(J, Tabulated):
        return np.interp(w, J.omega, J.values, left=0.0, right=0.0)
    if isinstance(J, Discrete):
        raise UnsupportedVariantError("pointwise evaluation is undefined for a discrete bath")
    raise UnsupportedVariantError(f"unknown spectral density {type(J).__name__}")


def evaluate(J: SpectralDensity, omega: ArrayLike):
    """Value of a continuum density at ``omega >= 0`` (scalar or array)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("spectral density is only defined for omega >= 0")
    out = _eval(J, w)
    return float(out) if out.ndim == 0 else out


def upper_cutoff(J: SpectralDensity) -> float:
    """Frequency beyond which ``J`` is treated as zero."""
    if isinstance(J, PowerLawExpCutoff):
        return J.omega_c * (40.0 + 10.0 * J.s)
    if isinstance(J, BandGap):
        return max(upper_cutoff(J.base), J.hi)
    if isinstance(J, Tabulated):
        return J.omega[-1]
    if isinstance(J, Discrete):
        return J.bath.omega[-1]
    raise UnsupportedVariantError(type(J).__name__)


def gaps(J: SpectralDensity) -> list[tuple[float, float]]:
    if isinstance(J, BandGap):
        return gaps(J.base) + [(J.lo, J.hi)]
    return []


def breakpoints(J: SpectralDensity) -> list[float]:
    """Sorted frequencies where ``J`` is non-smooth or changes scale."""
    if isinstance(J, PowerLawExpCutoff):
        pts = [0.0, J.omega_c, upper_cutoff(J)]
    elif isinstance(J, BandGap):
        pts = breakpoints(J.base) + [J.lo, J.hi]
    elif isinstance(J, Tabulated):
        pts = list(J.omega)
    else:
        raise UnsupportedVariantError("breakpoints are defined for continuum densities only")
    return sorted(set(pts))


def threshold_exponent(J: SpectralDensity) -> float:
    """Exponent ``p`` with ``J(w) ~ w**p`` as ``w -> 0``."""
    if isinstance(J, PowerLawExpCutoff):
        return J.s
    if isinstance(J, BandGap):
        return threshold_exponent(J.base)
    if isinstance(J, Tabulated):
        # linear interpolant: vanishes linearly unless J(0) > 0
        return 0.0 if J.omega[0] == 0.0 and J.values[0] > 0 else 1.0
    return 0.0


def regular_part(J: SpectralDensity, omega, power: float):
    """``J(w) * w**(-power)``, evaluated without a 0/0 at ``w == 0``.

    ``power`` may not exceed :func:`threshold_exponent`.
    """
    w = np.asarray(omega, dtype=float)
    if isinstance(J, PowerLawExpCutoff):
        return J.alpha * J.omega_c ** (1 - J.s) * w ** (J.s - power) * np.exp(-w / J.omega_c)
    if isinstance(J, BandGap):
        out = regular_part(J.base, w, power)
        return np.where((w >= J.lo) & (w <= J.hi), 0.0, out)
    if power == 0:
        return _eval(J, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _eval(J, w) * w ** (-power)
    # only the linear tabulated threshold reaches here with a finite limit
    limit = J.values[1] / J.omega[1] if isinstance(J, Tabulated) and power == 1 else 0.0
    return np.where(w > 0, out, limit)


def _segments(J: SpectralDensity, extra: Sequence[float] = ()) -> list[tuple[float, float]]:
    top = upper_cutoff(J)
    pts = sorted(set([p for p in breakpoints(J) + list(extra) if 0 <= p <= top]))
    holes = gaps(J)
    segs = []
    for a, b in zip(pts, pts[1:]):
        mid = 0.5 * (a + b)
        if any(lo <= mid <= hi for lo, hi in holes):
            continue
        segs.append((a, b))
    return segs


def integrate_density(J: SpectralDensity, f: Callable[[float], float],
                      singular_power: float = 0.0, points: Sequence[float] = (),
                      rtol: float = 1e-12) -> float:
    """Adaptive quadrature of ``int_0^inf J(w) * w**singular_power * f(w) dw``.

    ``f`` must be regular on the support of ``J``; a threshold singularity
    ``w**(p + singular_power)`` is absorbed in an algebraic weight on the first
    segment. ``points`` adds break points (e.g. near-singularities of ``f``).
    For a discrete bath the integral is the exact mode sum.
    """
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        return float(sum(l * l * x ** singular_power * f(x) for x, l in zip(w, lam)))
    p = threshold_exponent(J)
    total_power = p + singular_power
    if total_power <= -1:
        raise DivergenceError(f"integrand behaves like w**{total_power} at w = 0")
    if isinstance(J, Tabulated) and singular_power < 0 and J.omega[0] == 0 and J.values[0] > 0:
        raise DivergenceError("tabulated J(0) > 0 makes the integral diverge at w = 0")
    total = 0.0
    err = 0.0
    for a, b in _segments(J, points):
        if a == 0.0 and total_power != 0.0:
            def g(x, _p=p):
                return float(regular_part(J, x, _p)) * f(x)
            val, e, *_ = integrate.quad(g, a, b, weight="alg", wvar=(total_power, 0.0),
                                        epsabs=1e-15, epsrel=rtol, limit=400, full_output=1)
        else:
            def g(x):
                return float(_eval(J, np.asarray(x))) * x ** singular_power * f(x)
            val, e, *_ = integrate.quad(g, a, b, epsabs=1e-15, epsrel=rtol,
                                        limit=400, full_output=1)
        total += val
        err += e
    if err > max(1e-9 * abs(total), 1e-13):
        raise AccuracyError(f"quadrature error estimate {err:.3g} for value {total:.6g}")
    return total


def frequency_shift(J: SpectralDensity) -> float:
    """Bath-induced frequency shift ``-int J(w)/w dw`` (always <= 0)."""
    if isinstance(J, PowerLawExpCutoff):
        return -J.alpha * special.gamma(J.s) * J.omega_c
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        return -float(np.sum(lam ** 2 / w))
    if isinstance(J, Tabulated):
        w = np.asarray(J.omega)
        j = np.asarray(J.values)
        if w[0] == 0.0:
            if j[0] > 0:
                raise DivergenceError("tabulated J(0) > 0: int J/w diverges at w = 0")
            # linear interpolant: J/w -> slope of the first segment
            head = j[1] / w[1]
            ratio = np.concatenate(([head], j[1:] / w[1:]))
        else:
            ratio = j / w
        return -float(np.trapezoid(ratio, w))
    if isinstance(J, BandGap):
        return frequency_shift(J.base) + _gap_share(J)
    raise UnsupportedVariantError(type(J).__name__)


def _gap_share(J: BandGap) -> float:
    """``int_lo^hi base(w)/w dw``, the part of the base shift removed by the gap."""
    def g(x):
        return float(_eval(J.base, np.asarray(x))) / x
    val, err, *_ = integrate.quad(g, J.lo, J.hi, epsabs=1e-15, epsrel=1e-12,
                                  limit=400, full_output=1)
    if err > max(1e-9 * abs(val), 1e-13):
        raise AccuracyError(f"gap integral error estimate {err:.3g}")
    return val


def discretize(J: SpectralDensity, K: int, omega_max: float) -> DiscreteBath:
    """Midpoint discretization: ``w_k = (k - 1/2) dw``, ``lambda_k**2 = J(w_k) dw``.

    Modes with vanishing weight (e.g. inside a gap) are dropped.
    """
    if isinstance(J, Discrete):
        raise UnsupportedVariantError("bath is already discrete")
    if int(K) != K or K < 1:
        raise DomainError(f"K must be a positive integer, got {K}")
    if not omega_max > 0:
        raise DomainError(f"omega_max must be > 0, got {omega_max}")
    dw = omega_max / K
    w = (np.arange(1, int(K) + 1) - 0.5) * dw
    lam2 = _eval(J, w) * dw
    keep = lam2 > 0
    if not np.any(keep):
        raise DomainError("discretization produced no mode with nonzero coupling")
    return DiscreteBath(tuple(w[keep]), tuple(np.sqrt(lam2[keep])))


def read_tabulated_csv(path: Union[str, Path]) -> Tabulated:
    """Read a two-column ``omega, J`` CSV file; a non-numeric header row is skipped."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                a, b = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise DomainError(f"{path}: line {i + 1}: expected two numbers, got {row!r}")
            if not (math.isfinite(a) and math.isfinite(b)):
                raise DomainError(f"{path}: line {i + 1}: non-finite value")
            rows.append((a, b))
    return Tabulated(tuple(r[0] for r in rows), tuple(r[1] for r in rows))
