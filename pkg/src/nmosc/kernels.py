"""Dissipation and noise kernels of a bosonic bath.

    eta(t) = int_0^inf J(w) exp(-i w t) dw
    nu(t)  = int_0^inf J(w) nbar(w) exp(+i w t) dw,  nbar = 1/(exp(w/T) - 1)

Closed forms are used where they exist (power-law family, discrete modes);
everything else goes through panel quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

from . import quadrature
from .errors import DivergenceError, DomainError, UnsupportedVariantError
from .spectral import (BandGap, Discrete, PowerLawExpCutoff, SpectralDensity,
                       Tabulated, _eval, _segments, bose, threshold_exponent,
                       upper_cutoff)

_CHUNK = 1 << 22  # complex entries per outer-product block


def _as_times(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _scale(J: SpectralDensity) -> float:
    if isinstance(J, PowerLawExpCutoff):
        return 0.25 * J.omega_c
    if isinstance(J, BandGap):
        return min(_scale(J.base), 0.25 * (J.hi - J.lo))
    return upper_cutoff(J) / 200.0


def _mode_sum(omega, mass, t, sign):
    """``sum_j mass_j exp(sign * i * omega_j * t)`` for an array of times."""
    t = np.atleast_1d(t)
    out = np.empty(t.shape, dtype=complex)
    rows = max(1, _CHUNK // max(1, omega.size))
    flat = t.ravel()
    res = out.reshape(-1)
    for i in range(0, flat.size, rows):
        blk = flat[i:i + rows]
        res[i:i + rows] = np.exp(sign * 1j * np.outer(blk, omega)) @ mass
    return out


def eta_power_law(J: PowerLawExpCutoff, t):
    """Closed form ``alpha wc^(1-s) Gamma(s+1) (1/wc + i t)^-(s+1)``."""
    t, scalar = _as_times(t)
    pref = J.alpha * J.omega_c ** (1 - J.s) * special.gamma(J.s + 1)
    out = pref * (1.0 / J.omega_c + 1j * t) ** (-(J.s + 1))
    return complex(out) if scalar else out


def _quad_eta(J, t: float) -> complex:
    segs = _segments(J)

    def f(w):
        return _eval(J, w) * np.exp(-1j * w * t)
    return quadrature.adaptive_transform(f, segs, t, _scale(J), threshold_exponent(J))


def _gap_eta(J: BandGap, t: float) -> complex:
    def f(w):
        return _eval(J.base, w) * np.exp(-1j * w * t)
    return quadrature.adaptive_transform(f, [(J.lo, J.hi)], t, _scale(J))


def dissipation_kernel(J: SpectralDensity, t, method: str = "auto"):
    """Dissipation kernel ``eta(t)`` for scalar or array ``t``.

    ``method="auto"`` uses the closed form for power laws and discrete baths,
    the base closed form minus the excised gap integral for band gaps, and
    adaptive quadrature otherwise. ``method="quad"`` forces quadrature of the
    full integral (the independent route for cross-checks).
    """
    if method not in ("auto", "quad", "closed"):
        raise ValueError(f"unknown method {method!r}")
    tt, scalar = _as_times(t)
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        out = _mode_sum(w, lam ** 2, tt, -1.0)
        return complex(out[0]) if scalar else out
    if method == "closed" and not isinstance(J, PowerLawExpCutoff):
        raise UnsupportedVariantError(f"no closed form for {type(J).__name__}")
    if method in ("auto", "closed") and isinstance(J, PowerLawExpCutoff):
        return eta_power_law(J, t)
    flat = np.atleast_1d(tt).ravel()
    if method == "auto" and isinstance(J, BandGap):
        base = np.atleast_1d(dissipation_kernel(J.base, flat))
        vals = base - np.array([_gap_eta(J, x) for x in flat])
    else:
        vals = np.array([_quad_eta(J, x) for x in flat])
    return complex(vals[0]) if scalar else vals.reshape(np.shape(tt))


def _check_noise_integrable(J):
    if isinstance(J, Tabulated) and J.omega[0] == 0 and J.values[0] > 0:
        raise DivergenceError("tabulated J(0) > 0: the noise kernel diverges at T > 0")
    if threshold_exponent(J) - 1.0 <= -1.0:
        raise DivergenceError("noise kernel integrand not integrable at w = 0")


def noise_kernel(J: SpectralDensity, temperature: float, t):
    """Noise kernel ``nu(t)``; exactly zero at ``T == 0``."""
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    tt, scalar = _as_times(t)
    if temperature == 0:
        return 0j if scalar else np.zeros(tt.shape, dtype=complex)
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        out = _mode_sum(w, lam ** 2 * bose(w, temperature), tt, 1.0)
        return complex(out[0]) if scalar else out
    _check_noise_integrable(J)
    segs = _segments(J)
    power = threshold_exponent(J) - 1.0

    def make(x):
        def f(w):
            return _eval(J, w) * bose(w, temperature) * np.exp(1j * w * x)
        return f
    flat = np.atleast_1d(tt).ravel()
    vals = np.array([quadrature.adaptive_transform(make(x), segs, x, _scale(J), power)
                     for x in flat])
    return complex(vals[0]) if scalar else vals.reshape(np.shape(tt))


def spectral_nodes(J: SpectralDensity, t_max: float, temperature: Optional[float] = None,
                   order: int = quadrature.DEFAULT_ORDER):
    """Frequency nodes and masses resolving transforms up to ``|t| = t_max``.

    Returns ``(omega, mass)`` with ``mass_j ~ J(omega_j) dw`` (times ``nbar``
    when a temperature is given), so that ``sum_j mass_j exp(-i omega_j t)``
    approximates ``eta(t)``. Discrete baths return their modes exactly.
    """
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        mass = lam ** 2
        if temperature is not None:
            mass = mass * bose(w, temperature)
        return w, mass
    power = threshold_exponent(J)
    if temperature is not None:
        _check_noise_integrable(J)
        power -= 1.0
    width = quadrature.oscillation_width(t_max, _scale(J))
    w, wt = quadrature.composite_rule(_segments(J), width, order, power)
    mass = wt * _eval(J, w)
    if temperature is not None:
        mass = mass * bose(w, temperature)
    keep = mass > 1e-18 * mass.max() if mass.size and mass.max() > 0 else mass > 0
    return w[keep], mass[keep]


def _eta_grid(J: SpectralDensity, times: np.ndarray) -> np.ndarray:
    if isinstance(J, PowerLawExpCutoff):
        return eta_power_law(J, times)
    if isinstance(J, Discrete):
        w, lam = J.bath.arrays()
        return _mode_sum(w, lam ** 2, times, -1.0)
    t_max = float(times[-1]) if times.size else 0.0
    if isinstance(J, BandGap):
        width = quadrature.oscillation_width(t_max, _scale(J))
        w, wt = quadrature.composite_rule([(J.lo, J.hi)], width)
        return _eta_grid(J.base, times) - _mode_sum(w, wt * _eval(J.base, w), times, -1.0)
    w, mass = spectral_nodes(J, t_max)
    return _mode_sum(w, mass, times, -1.0)


@dataclass
class BathKernels:
    """Kernels of one bath at one temperature, cached on a uniform time grid.

    ``eta_values[n]`` holds ``eta(n * step)`` for lags ``n = 0..n_steps``.
    ``noise_nodes`` is the frequency rule (with Bose weights folded into the
    masses) shared by the noise kernel and the xi accumulation.
    """

    J: SpectralDensity
    temperature: float
    step: float
    n_steps: int
    eta_values: np.ndarray
    noise_nodes: tuple[np.ndarray, np.ndarray]
    _nu_values: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def build(cls, J: SpectralDensity, temperature: float, step: float,
              horizon: float) -> "BathKernels":
        if temperature < 0:
            raise DomainError("temperature must be >= 0")
        if not step > 0:
            raise DomainError("step must be > 0")
        n = int(round(horizon / step))
        if n < 1 or abs(n * step - horizon) > 1e-9 * max(1.0, horizon):
            raise DomainError(f"horizon {horizon} is not a positive integer multiple of step {step}")
        times = step * np.arange(n + 1)
        eta = _eta_grid(J, times)
        if temperature == 0:
            nodes = (np.zeros(0), np.zeros(0))
        else:
            nodes = spectral_nodes(J, n * step, temperature)
        return cls(J, float(temperature), float(step), n, eta, nodes)

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(self.n_steps + 1)

    def eta(self, t):
        return dissipation_kernel(self.J, t)

    def nu(self, t):
        return noise_kernel(self.J, self.temperature, t)

    @property
    def nu_values(self) -> np.ndarray:
        """Noise kernel on the lag grid, from the cached frequency rule."""
        if self._nu_values is None:
            w, mass = self.noise_nodes
            if w.size == 0:
                self._nu_values = np.zeros(self.n_steps + 1, dtype=complex)
            else:
                self._nu_values = _mode_sum(w, mass, self.times, 1.0)
        return self._nu_values
