"""SVG figures written next to the CSV outputs.

Figures are produced with the non-interactive Agg backend and fixed SVG
metadata, so reruns give identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import atomic_write  # noqa: E402

_RC = {
    "svg.hashsalt": "nmosc",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
}


def _save(fig, path) -> None:
    import io
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": "nmosc"})
    plt.close(fig)
    atomic_write(path, buf.getvalue())


def plot_coefficients(times, gamma, omega_tilde, path, omega0=None) -> None:
    """Damping rate (top) and renormalized frequency (bottom) against time."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(5.0, 4.6))
        ax1.plot(times, gamma, color="C0")
        ax1.axhline(0.0, color="0.6", lw=0.6)
        ax1.set_ylabel(r"$\gamma(t)$")
        ax2.plot(times, omega_tilde, color="C3")
        if omega0 is not None:
            ax2.axhline(omega0, color="0.3", ls="--", lw=0.8, label=r"$\omega_0$")
            ax2.legend(frameon=False, loc="best")
        ax2.axhline(0.0, color="0.6", lw=0.6)
        ax2.set_ylabel(r"$\tilde\Omega(t)$")
        ax2.set_xlabel(r"$t$")
        ax2.set_xlim(times[0], times[-1])
        fig.tight_layout()
        _save(fig, path)


def plot_sweep(values, margin, omega0, name: str, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ax.plot(values, margin, color="C0", label=r"$\Omega+\delta\Omega$")
        ax.plot(values, np.where(np.isnan(omega0), np.nan, omega0), color="C3",
                label=r"$\omega_0$")
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_xlabel(name)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_convergence(steps, errors, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.4, 3.4))
        steps = np.asarray(steps, dtype=float)
        errors = np.asarray(errors, dtype=float)
        ax.loglog(steps, errors, "o-", color="C0", label="solver vs exact")
        ref = errors[-1] * (steps / steps[-1]) ** 2
        ax.loglog(steps, ref, ls="--", color="0.5", label=r"$\propto h^2$")
        ax.set_xlabel("step h")
        ax.set_ylabel(r"max $|u - u_{\rm exact}|$")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
