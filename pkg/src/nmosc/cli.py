"""``nmosc`` command line: simulate, bound-state, oracle-compare.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .bound_state import negative_pole, qbm_stability, stability_report
from .coefficients import compute_coefficients, compute_xi, mean_occupation
from .config import RunConfig, load_config
from .errors import ConfigError, InsufficientDataError, NmoscError, NumericError
from .kernels import BathKernels
from .oracle import exact_u, qbm_hessian_check
from .propagator import long_time_behavior, solve_u
from .spectral import Discrete, discretize

log = logging.getLogger("nmosc")

SWEEPABLE = ("Omega", "alpha", "s", "omega_c")


def simulated_density(cfg: RunConfig):
    J = cfg.spectral_density()
    if cfg.discretization is not None:
        K, wmax = cfg.discretization
        try:
            J = Discrete(discretize(J, K, wmax))
        except NmoscError as exc:
            raise ConfigError(f"discretization: {exc}") from exc
    return J


def cmd_simulate(cfg: RunConfig) -> Path:
    out = cfg.output_dir()
    J = simulated_density(cfg)
    log.info("building kernels for %d steps", cfg.n_steps)
    kernels = BathKernels.build(J, cfg.temperature, cfg.step, cfg.horizon)
    traj = solve_u(kernels, cfg.Omega, cfg.horizon, cfg.step)
    xi, xi_dot = compute_xi(traj, kernels)
    coeffs = compute_coefficients(traj, xi, xi_dot)
    occ = mean_occupation(traj, coeffs, cfg.n0)
    report = stability_report(J, cfg.Omega)

    io.write_csv(out / "propagator.csv",
                 ["t", "re_u", "im_u", "abs_u", "re_u_dot", "im_u_dot"],
                 [traj.times, traj.u.real, traj.u.imag, np.abs(traj.u),
                  traj.u_dot.real, traj.u_dot.imag])
    io.write_csv(out / "coefficients.csv",
                 ["t", "omega_tilde", "gamma", "xi", "gamma_n", "n_mean", "valid"],
                 [coeffs.times, coeffs.omega_tilde, coeffs.gamma, coeffs.xi,
                  coeffs.gamma_n, occ.closed_form, coeffs.valid_mask])

    items = {"Omega": cfg.Omega, "temperature": cfg.temperature,
             "horizon": cfg.horizon, "step": cfg.step}
    items.update(report.as_dict())
    try:
        lt = long_time_behavior(traj, cfg.window)
        items.update({
            "long_time.window": cfg.window,
            "long_time.plateau_modulus": lt.plateau_modulus,
            "long_time.rotation_frequency": lt.rotation_frequency,
            "long_time.modulus_spread": lt.modulus_spread,
            "long_time.is_dissipationless": lt.is_dissipationless,
        })
    except InsufficientDataError as exc:
        items["long_time"] = f"unavailable ({exc})"
    items["occupation.n0"] = cfg.n0
    items["occupation.max_deviation"] = occ.max_deviation
    items["masked_samples"] = int(np.sum(~coeffs.valid_mask))
    io.write_report(out / "report.txt", items, "nmosc simulate")
    io.write_json(out / "report.json", items)

    if cfg.emit_plots:
        from .plotting import plot_coefficients
        omega0 = report.pole.omega0 if report.pole is not None else None
        plot_coefficients(coeffs.times, coeffs.gamma, coeffs.omega_tilde,
                          out / "coefficients.svg", omega0)
    return out


def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = text.split("=", 1)
        lo, hi, n = rng.split(":")
        values = np.linspace(float(lo), float(hi), int(n))
    except ValueError:
        raise ConfigError(f"--sweep: expected <param>=<lo>:<hi>:<n>, got {text!r}") from None
    name = name.strip()
    if name not in SWEEPABLE:
        raise ConfigError(f"--sweep: parameter must be one of {', '.join(SWEEPABLE)}")
    if len(values) < 1:
        raise ConfigError("--sweep: need at least one point")
    return name, values


def _swept(cfg: RunConfig, name: str, value: float) -> tuple[RunConfig, float]:
    if name == "Omega":
        return cfg, value
    if cfg.bath.model != "power_law":
        raise ConfigError(f"--sweep {name} needs bath.model = power_law")
    return replace(cfg, bath=replace(cfg.bath, **{name: value})), cfg.Omega


def cmd_bound_state(cfg: RunConfig, sweep: Optional[str] = None) -> Path:
    out = cfg.output_dir()
    J = simulated_density(cfg)
    report = stability_report(J, cfg.Omega)
    items = report.as_dict()
    qbath = cfg.qbm_bath()
    if qbath is not None:
        q = qbm_stability(cfg.qbm_kappa, qbath)
        chk = qbm_hessian_check(cfg.qbm_kappa, qbath.masses, qbath.omegas, qbath.couplings)
        items.update({f"qbm.{k}": v for k, v in q.as_dict().items()})
        items["qbm.schur_complement"] = chk.schur_complement
        items["qbm.potential_min_eigenvalue"] = chk.min_eigenvalue
        items["qbm.positive_semidefinite"] = chk.positive_semidefinite
    io.write_report(out / "bound_state.txt", items, "nmosc bound-state")
    io.write_json(out / "bound_state.json", items)

    if sweep:
        name, values = parse_sweep(sweep)
        rows = []
        for v in values:
            c, Omega = _swept(cfg, name, float(v))
            Jv = simulated_density(c)
            r = stability_report(Jv, Omega)
            rows.append((v, r.delta_omega, r.margin, r.unbounded,
                         np.nan if r.pole is None else r.pole.omega0,
                         np.nan if r.pole is None else r.pole.residue))
        cols = list(zip(*rows))
        io.write_csv(out / "sweep.csv",
                     [name, "delta_omega", "margin", "unbounded", "omega0", "residue_r"], cols)
        if cfg.emit_plots:
            from .plotting import plot_sweep
            plot_sweep(np.array(cols[0]), np.array(cols[2]), np.array(cols[4], dtype=float),
                       name, out / "sweep.svg")
    return out


def cmd_oracle_compare(cfg: RunConfig) -> Path:
    out = cfg.output_dir()
    J = simulated_density(cfg)
    if not isinstance(J, Discrete):
        raise ConfigError("oracle-compare needs a discrete bath or a discretization section")
    for h in cfg.oracle_steps:
        n = round(cfg.horizon / h)
        if n < 1 or abs(n * h - cfg.horizon) > 1e-9 * max(1.0, cfg.horizon):
            raise ConfigError(f"oracle.steps: horizon {cfg.horizon} is not a multiple of {h}")
    steps = sorted(cfg.oracle_steps, reverse=True)
    errors = []
    for h in steps:
        kernels = BathKernels.build(J, 0.0, h, cfg.horizon)
        traj = solve_u(kernels, cfg.Omega, cfg.horizon, h)
        ref = exact_u(J.bath, cfg.Omega, traj.times)
        errors.append(float(np.max(np.abs(traj.u - ref.u))))
    ratios = [np.nan] + [a / b if b > 0 else np.nan for a, b in zip(errors, errors[1:])]
    io.write_csv(out / "oracle_compare.csv", ["step", "max_error", "ratio"], [steps, errors, ratios])
    items = {"modes": J.bath.size, "Omega": cfg.Omega, "horizon": cfg.horizon}
    for h, e, r in zip(steps, errors, ratios):
        items[f"step {io.format_value(h)}"] = f"max_error={io.format_value(e)} ratio={io.format_value(r)}"
    items["monotone"] = all(b <= a for a, b in zip(errors, errors[1:]))
    io.write_report(out / "oracle_compare.txt", items, "nmosc oracle-compare")
    if cfg.emit_plots:
        from .plotting import plot_convergence
        plot_convergence(steps, errors, out / "convergence.svg")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmosc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "propagate u(t) and the master-equation coefficients"),
                        ("bound-state", "stability margin, poles and coupled-oscillator check"),
                        ("oracle-compare", "time stepper against exact diagonalization")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-c", "--config", required=True, help="run configuration file")
        if name == "bound-state":
            p.add_argument("--sweep", help="<param>=<lo>:<hi>:<n>, param in " + ", ".join(SWEEPABLE))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "simulate":
            out = cmd_simulate(cfg)
        elif args.command == "bound-state":
            out = cmd_bound_state(cfg, args.sweep)
        else:
            out = cmd_oracle_compare(cfg)
    except ConfigError as exc:
        print(f"nmosc: config error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"nmosc: numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nmosc: I/O error: {exc}", file=sys.stderr)
        return 3
    except NmoscError as exc:
        print(f"nmosc: error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
