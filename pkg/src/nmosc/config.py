"""Run configuration: a flat file of ``section.key = value`` lines.

Grammar::

    line    := blank | comment | entry
    comment := '#' anything
    entry   := section '.' key '=' value

Recognized keys (defaults in brackets)::

    system.Omega                     oscillator frequency (required)
    system.n0                        initial occupation [0]
    bath.model                       power_law | tabulated | discrete (required)
    bath.alpha, bath.s, bath.omega_c power-law parameters
    bath.path                        tabulated CSV, relative to the config file
    bath.modes                       discrete modes "w1:l1, w2:l2, ..."
    bath.gap                         optional spectral gap "lo, hi"
    bath.temperature                 [0]
    grid.horizon, grid.step          time grid (horizon/step must be integral)
    discretization.K                 optional: simulate a midpoint-discretized bath
    discretization.omega_max
    analysis.window                  tail fraction for long-time analysis [0.25]
    outputs.directory                [nmosc_out]; NMOSC_OUT overrides
    outputs.emit_plots               [false]
    qbm.kappa, qbm.modes             optional coupled-oscillator model "m:w:c, ..."
    oracle.steps                     step sizes for oracle-compare [0.02, 0.01, 0.005]
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .bound_state import QbmBath
from .errors import ConfigError, NmoscError
from .spectral import (BandGap, Discrete, DiscreteBath, PowerLawExpCutoff,
                       SpectralDensity, read_tabulated_csv)

MODELS = ("power_law", "tabulated", "discrete")
KNOWN_KEYS = {
    "system": ("Omega", "n0"),
    "bath": ("model", "alpha", "s", "omega_c", "path", "modes", "gap", "temperature"),
    "grid": ("horizon", "step"),
    "discretization": ("K", "omega_max"),
    "analysis": ("window",),
    "outputs": ("directory", "emit_plots"),
    "qbm": ("kappa", "modes"),
    "oracle": ("steps",),
}


@dataclass(frozen=True)
class BathSpec:
    model: str
    alpha: Optional[float] = None
    s: Optional[float] = None
    omega_c: Optional[float] = None
    path: Optional[str] = None
    modes: Optional[tuple[tuple[float, float], ...]] = None
    gap: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class RunConfig:
    Omega: float
    bath: BathSpec
    horizon: float
    step: float
    temperature: float = 0.0
    n0: float = 0.0
    discretization: Optional[tuple[int, float]] = None
    window: float = 0.25
    directory: str = "nmosc_out"
    emit_plots: bool = False
    qbm_kappa: Optional[float] = None
    qbm_modes: Optional[tuple[tuple[float, float, float], ...]] = None
    oracle_steps: tuple[float, ...] = (0.02, 0.01, 0.005)
    base_dir: str = field(default=".", compare=False)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))

    def output_dir(self) -> Path:
        return Path(os.environ.get("NMOSC_OUT") or self.directory)

    def spectral_density(self) -> SpectralDensity:
        """The bath as specified (before any discretization)."""
        b = self.bath
        try:
            if b.model == "power_law":
                J = PowerLawExpCutoff(b.alpha, b.s, b.omega_c)
            elif b.model == "tabulated":
                J = read_tabulated_csv(Path(self.base_dir) / b.path)
            else:
                return Discrete(DiscreteBath.from_modes(b.modes))
            if b.gap is not None:
                J = BandGap(J, *b.gap)
            return J
        except OSError:
            raise
        except NmoscError as exc:
            raise ConfigError(f"bath: {exc}") from exc

    def qbm_bath(self) -> Optional[QbmBath]:
        if self.qbm_modes is None:
            return None
        try:
            return QbmBath.from_modes(self.qbm_modes)
        except NmoscError as exc:
            raise ConfigError(f"qbm.modes: {exc}") from exc

    def to_text(self) -> str:
        """Serialize back to the config grammar (round-trips through :func:`parse_config`)."""
        b = self.bath
        lines = [f"system.Omega = {self.Omega!r}", f"system.n0 = {self.n0!r}",
                 f"bath.model = {b.model}"]
        if b.model == "power_law":
            lines += [f"bath.alpha = {b.alpha!r}", f"bath.s = {b.s!r}",
                      f"bath.omega_c = {b.omega_c!r}"]
        elif b.model == "tabulated":
            lines.append(f"bath.path = {b.path}")
        else:
            lines.append("bath.modes = " + ", ".join(f"{w!r}:{l!r}" for w, l in b.modes))
        if b.gap is not None:
            lines.append(f"bath.gap = {b.gap[0]!r}, {b.gap[1]!r}")
        lines += [f"bath.temperature = {self.temperature!r}",
                  f"grid.horizon = {self.horizon!r}", f"grid.step = {self.step!r}"]
        if self.discretization is not None:
            lines += [f"discretization.K = {self.discretization[0]}",
                      f"discretization.omega_max = {self.discretization[1]!r}"]
        lines += [f"analysis.window = {self.window!r}",
                  f"outputs.directory = {self.directory}",
                  f"outputs.emit_plots = {'true' if self.emit_plots else 'false'}"]
        if self.qbm_kappa is not None:
            lines.append(f"qbm.kappa = {self.qbm_kappa!r}")
            lines.append("qbm.modes = " + ", ".join(f"{m!r}:{w!r}:{c!r}" for m, w, c in self.qbm_modes))
        lines.append("oracle.steps = " + ", ".join(repr(h) for h in self.oracle_steps))
        return "\n".join(lines) + "\n"


class _Entries:
    """Parsed key/value pairs with the line each came from."""

    def __init__(self, source: str):
        self.source = source
        self.values: dict[str, tuple[str, int]] = {}
        self.used: set[str] = set()

    def error(self, key: str, msg: str) -> ConfigError:
        line = self.values.get(key, (None, None))[1]
        where = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{where}: {key}: {msg}")

    def raw(self, key: str) -> Optional[str]:
        self.used.add(key)
        return self.values[key][0] if key in self.values else None

    def number(self, key: str, default=None, required=False) -> Optional[float]:
        text = self.raw(key)
        if text is None:
            if required:
                raise self.error(key, "missing required key")
            return default
        try:
            val = float(text)
        except ValueError:
            raise self.error(key, f"expected a number, got {text!r}") from None
        if not math.isfinite(val):
            raise self.error(key, "value must be finite")
        return val

    def numbers(self, key: str) -> Optional[list[float]]:
        text = self.raw(key)
        if text is None:
            return None
        try:
            return [float(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise self.error(key, f"expected comma-separated numbers, got {text!r}") from None

    def tuples(self, key: str, width: int) -> Optional[tuple]:
        text = self.raw(key)
        if text is None:
            return None
        out = []
        for item in text.split(","):
            if not item.strip():
                continue
            parts = item.split(":")
            if len(parts) != width:
                raise self.error(key, f"expected {width} ':'-separated numbers per item, got {item.strip()!r}")
            try:
                out.append(tuple(float(p) for p in parts))
            except ValueError:
                raise self.error(key, f"bad number in {item.strip()!r}") from None
        if not out:
            raise self.error(key, "empty list")
        return tuple(out)


def _tokenize(text: str, source: str) -> _Entries:
    entries = _Entries(source)
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (p.strip() for p in stripped.split("=", 1))
        if "." not in key:
            raise ConfigError(f"{source}:{lineno}: key {key!r} lacks a section")
        section, name = key.split(".", 1)
        if section not in KNOWN_KEYS or name not in KNOWN_KEYS[section]:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in entries.values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: {key}: empty value")
        entries.values[key] = (value, lineno)
    return entries


def parse_config(text: str, source: str = "<config>", base_dir: str = ".") -> RunConfig:
    e = _tokenize(text, source)
    Omega = e.number("system.Omega", required=True)
    n0 = e.number("system.n0", 0.0)
    if n0 < 0:
        raise e.error("system.n0", "must be >= 0")

    model = e.raw("bath.model")
    if model is None:
        raise e.error("bath.model", "missing required key")
    if model not in MODELS:
        raise e.error("bath.model", f"must be one of {', '.join(MODELS)}")
    spec = {"model": model}
    if model == "power_law":
        for k in ("alpha", "s", "omega_c"):
            spec[k] = e.number(f"bath.{k}", required=True)
        if spec["alpha"] < 0:
            raise e.error("bath.alpha", "must be >= 0")
        if spec["s"] <= 0:
            raise e.error("bath.s", "must be > 0")
        if spec["omega_c"] <= 0:
            raise e.error("bath.omega_c", "must be > 0")
    elif model == "tabulated":
        spec["path"] = e.raw("bath.path")
        if spec["path"] is None:
            raise e.error("bath.path", "missing required key for tabulated bath")
    else:
        spec["modes"] = e.tuples("bath.modes", 2)
        if spec["modes"] is None:
            raise e.error("bath.modes", "missing required key for discrete bath")
    gap = e.numbers("bath.gap")
    if gap is not None:
        if model == "discrete":
            raise e.error("bath.gap", "a gap applies to continuum baths only")
        if len(gap) != 2 or not 0 < gap[0] < gap[1]:
            raise e.error("bath.gap", "expected 'lo, hi' with 0 < lo < hi")
        spec["gap"] = (gap[0], gap[1])
    for k in ("alpha", "s", "omega_c", "path", "modes"):
        key = f"bath.{k}"
        if key in e.values and key not in e.used:
            raise e.error(key, f"not used by bath.model = {model}")
    T = e.number("bath.temperature", 0.0)
    if T < 0:
        raise e.error("bath.temperature", "must be >= 0")

    horizon = e.number("grid.horizon", required=True)
    step = e.number("grid.step", required=True)
    if step <= 0:
        raise e.error("grid.step", "must be > 0")
    if horizon <= 0:
        raise e.error("grid.horizon", "must be > 0")
    n = round(horizon / step)
    if n < 1 or abs(n * step - horizon) > 1e-9 * max(1.0, horizon):
        raise e.error("grid.horizon", f"horizon/step = {horizon / step} is not an integer")

    disc = None
    K = e.number("discretization.K")
    wmax = e.number("discretization.omega_max")
    if (K is None) != (wmax is None):
        raise e.error("discretization.K", "K and omega_max must be given together")
    if K is not None:
        if K < 1 or K != int(K):
            raise e.error("discretization.K", "must be a positive integer")
        if wmax <= 0:
            raise e.error("discretization.omega_max", "must be > 0")
        if model == "discrete":
            raise e.error("discretization.K", "bath is already discrete")
        disc = (int(K), wmax)

    window = e.number("analysis.window", 0.25)
    if not 0 < window < 1:
        raise e.error("analysis.window", "must lie in (0, 1)")
    directory = e.raw("outputs.directory") or "nmosc_out"
    plots = (e.raw("outputs.emit_plots") or "false").lower()
    if plots not in ("true", "false", "yes", "no", "1", "0"):
        raise e.error("outputs.emit_plots", "expected true or false")

    kappa = e.number("qbm.kappa")
    qmodes = e.tuples("qbm.modes", 3)
    if (kappa is None) != (qmodes is None):
        raise e.error("qbm.kappa", "qbm.kappa and qbm.modes must be given together")

    steps = e.numbers("oracle.steps")
    if steps is not None and (not steps or any(h <= 0 for h in steps)):
        raise e.error("oracle.steps", "expected positive step sizes")

    cfg = RunConfig(
        Omega=Omega, bath=BathSpec(**spec), horizon=horizon, step=step,
        temperature=T, n0=n0, discretization=disc, window=window,
        directory=directory, emit_plots=plots in ("true", "yes", "1"),
        qbm_kappa=kappa, qbm_modes=qmodes,
        oracle_steps=tuple(steps) if steps else RunConfig.oracle_steps,
        base_dir=base_dir,
    )
    if cfg.bath.model == "discrete":
        cfg.spectral_density()  # validates the mode list
    if qmodes is not None:
        cfg.qbm_bath()
    return cfg


def load_config(path) -> RunConfig:
    """Read and validate a config file; I/O errors propagate as ``OSError``."""
    path = Path(path)
    text = path.read_text()
    return parse_config(text, str(path), str(path.parent))

