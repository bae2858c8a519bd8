"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``[ACCEPT n] PASS|FAIL`` line with the measured
quantity, the tolerance and the wall time.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from nmosc.bound_state import QbmBath, discrete_bound_energy, negative_pole, qbm_stability
from nmosc.coefficients import compute_coefficients, compute_xi, mean_occupation
from nmosc.kernels import BathKernels, dissipation_kernel, noise_kernel
from nmosc.oracle import (bound_state_eigen, exact_u, ladder_check,
                          qbm_hessian_check, sector_hamiltonian,
                          single_excitation_matrix)
from nmosc.propagator import long_time_behavior, solve_u
from nmosc.spectral import (BandGap, Discrete, DiscreteBath, PowerLawExpCutoff,
                            Tabulated, discretize)

OHMIC = PowerLawExpCutoff(1.0, 1.0, 1.0)


@pytest.fixture
def announce(capsys):
    def emit(n, title, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n[ACCEPT {n}] {'PASS' if ok else 'FAIL'} {title}: {detail} ({elapsed:.2f} s)")
    return emit


@pytest.fixture(scope="module")
def bath():
    return discretize(OHMIC, 20, 5.0)


def solver_error(bath, h):
    t0 = time.perf_counter()
    k = BathKernels.build(Discrete(bath), 0.0, h, 10.0)
    tr = solve_u(k, 1.0, 10.0, h)
    elapsed = time.perf_counter() - t0
    return float(np.max(np.abs(tr.u - exact_u(bath, 1.0, tr.times).u))), elapsed


def test_criterion_1_oracle_equivalence(bath, announce):
    err, elapsed = solver_error(bath, 0.005)
    ok = err < 1e-4 and elapsed < 5.0
    announce(1, "propagator vs exact diagonalization",
             ok, f"max|u - u_exact| = {err:.3e} (tol 1e-4), runtime limit 5 s", elapsed)
    assert ok


def test_criterion_2_convergence_order(bath, announce):
    t0 = time.perf_counter()
    coarse, _ = solver_error(bath, 0.01)
    fine, _ = solver_error(bath, 0.005)
    ratio = coarse / fine
    ok = 3.5 <= ratio <= 4.5
    announce(2, "second-order convergence", ok,
             f"err(h=0.01)/err(h=0.005) = {ratio:.4f} (allowed [3.5, 4.5])",
             time.perf_counter() - t0)
    assert ok


def test_criterion_3_iff_sweep(announce):
    t0 = time.perf_counter()
    alphas = np.linspace(0.01, 3.0, 100)
    step = alphas[1] - alphas[0]
    margins = 1.0 - alphas  # Omega - alpha Gamma(1) omega_c
    pole = np.array([negative_pole(PowerLawExpCutoff(a, 1.0, 1.0), 1.0) is not None
                     for a in alphas])
    # independent detector: negative eigenvalue of a dense discretized arrowhead matrix
    unit = discretize(OHMIC, 400, 30.0)
    w = np.array(unit.omega)
    eig = []
    for a in alphas:
        scaled = DiscreteBath(unit.omega, tuple(math.sqrt(a) * np.array(unit.coupling)))
        eig.append(np.linalg.eigvalsh(single_excitation_matrix(scaled, 1.0))[0] < 0)
    eig = np.array(eig)
    first_pole = alphas[np.argmax(pole)]
    first_eig = alphas[np.argmax(eig)]
    elapsed = time.perf_counter() - t0
    ok = (np.array_equal(pole, margins < 0)
          and np.all(np.diff(pole.astype(int)) >= 0) and np.all(np.diff(eig.astype(int)) >= 0)
          and abs(first_pole - 1.0) <= step and abs(first_eig - 1.0) <= step
          and elapsed < 10.0 and w.size == 400)
    announce(3, "pole exists iff margin < 0", ok,
             f"root finder flips at alpha = {first_pole:.4f}, eigensolver at {first_eig:.4f}, "
             f"threshold 1, grid step {step:.4f}, runtime limit 10 s", elapsed)
    assert ok


def test_criterion_4_bound_state_energy(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst, n_bound, n_free, ok = 0.0, 0, 0, True
    for _ in range(20):
        K = int(rng.integers(1, 11))
        bath = DiscreteBath(tuple(np.sort(rng.uniform(0.1, 3.0, K))), tuple(rng.uniform(0.05, 1.5, K)))
        shift = float(np.sum(np.array(bath.coupling) ** 2 / np.array(bath.omega)))
        Omega = shift * rng.uniform(0.3, 1.7)
        E_root = discrete_bound_energy(bath, Omega)
        E_eig, _ = bound_state_eigen(bath, Omega)
        if Omega - shift < 0:
            n_bound += 1
            ok &= E_root is not None and E_eig < 0
            if E_root is not None:
                worst = max(worst, abs(E_root - E_eig))
        else:
            n_free += 1
            ok &= E_root is None and E_eig >= 0
    ok = bool(ok and worst < 1e-10 and n_bound > 0 and n_free > 0)
    announce(4, "discrete bound energy vs eigensolver", ok,
             f"{n_bound} bound / {n_free} unbound baths, max |E_root - E_eig| = {worst:.2e} (tol 1e-10)",
             time.perf_counter() - t0)
    assert ok


def test_criterion_5_ladder(announce):
    t0 = time.perf_counter()
    bath = DiscreteBath.from_modes([(1.0, 2.0)])
    rep = ladder_check(bath, 1.0, n_max=3)
    H2, _ = sector_hamiltonian(single_excitation_matrix(bath, 1.0), 2)
    spec2 = np.linalg.eigvalsh(H2)
    dist = float(np.min(np.abs(spec2 + 2.0)))
    resid = max(lv.residual for lv in rep.levels)
    ok = rep.passed and dist < 1e-10 and abs(rep.single_energy + 1.0) < 1e-12
    announce(5, "ladder (C^dag)^n |0> with eigenvalue nE", ok,
             f"levels {[round(lv.target, 12) for lv in rep.levels]}, "
             f"max eigenvector residual {resid:.1e}, dist(-2, sector-2 spectrum) {dist:.1e} (tol 1e-10)",
             time.perf_counter() - t0)
    assert ok


def test_criterion_6_dissipationless_regime(announce):
    t0 = time.perf_counter()
    J = PowerLawExpCutoff(2.0, 0.5, 1.0)
    Omega, h, horizon = 1.0, 0.005, 200.0
    k = BathKernels.build(J, 0.0, h, horizon)
    tr = solve_u(k, Omega, horizon, h)
    xi, xi_dot = compute_xi(tr, k)
    c = compute_coefficients(tr, xi, xi_dot)
    elapsed = time.perf_counter() - t0
    pole = negative_pole(J, Omega)
    tail = slice(-len(tr.times) // 4, None)
    gamma_max = float(np.max(np.abs(c.gamma[tail])))
    freq_dev = float(np.max(np.abs(c.omega_tilde[tail] - pole.omega0)) / abs(pole.omega0))
    lt = long_time_behavior(tr, 0.25)
    mod_dev = abs(lt.plateau_modulus - pole.residue) / pole.residue
    ok = (Omega + (-2.0 * math.gamma(0.5)) < 0 and gamma_max < 1e-3 and freq_dev < 1e-2
          and mod_dev < 1e-2 and pole.omega0 < 0 and elapsed < 60.0)
    announce(6, "sub-Ohmic dissipationless regime", ok,
             f"late max|gamma| = {gamma_max:.2e} (tol 1e-3), "
             f"max|omega_tilde - omega0|/|omega0| = {freq_dev:.2e} (tol 1e-2), "
             f"|plateau - r|/r = {mod_dev:.2e} (tol 1e-2), omega0 = {pole.omega0:.6f}, "
             f"runtime limit 60 s", elapsed)
    assert ok


def test_criterion_7_moment_consistency(bath, announce):
    t0 = time.perf_counter()
    k = BathKernels.build(Discrete(bath), 1.0, 0.005, 10.0)
    tr = solve_u(k, 1.0, 10.0, 0.005)
    xi, xi_dot = compute_xi(tr, k)
    c = compute_coefficients(tr, xi, xi_dot)
    devs = {n0: mean_occupation(tr, c, n0).max_deviation for n0 in (0.0, 1.0, 5.0)}
    xi_min = float(np.min(c.xi))
    ok = xi_min >= -1e-10 and max(devs.values()) < 1e-4 and bool(np.all(c.valid_mask))
    announce(7, "xi positivity and moment equation", ok,
             f"min xi = {xi_min:.2e} (>= -1e-10), deviation by n0 "
             + ", ".join(f"{n:g}: {d:.2e}" for n, d in devs.items()) + " (tol 1e-4)",
             time.perf_counter() - t0)
    assert ok


def test_criterion_8_qbm_schur(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    worst, ok, n_unstable = 0.0, True, 0
    for _ in range(20):
        K = int(rng.integers(1, 8))
        m, w, c = rng.uniform(0.5, 2.0, K), rng.uniform(0.5, 2.0, K), rng.uniform(-1.5, 1.5, K)
        kappa = rng.uniform(0.1, 4.0)
        rep = qbm_stability(kappa, QbmBath(tuple(m), tuple(w), tuple(c)))
        chk = qbm_hessian_check(kappa, m, w, c)
        worst = max(worst, abs(chk.schur_complement - rep.kappa_R))
        psd_eig = chk.min_eigenvalue >= 0
        ok &= psd_eig == (rep.kappa_R >= 0) and chk.positive_semidefinite == (rep.kappa_R >= 0)
        n_unstable += rep.unstable
    ok = bool(ok and worst < 1e-12 and 0 < n_unstable < 20)
    announce(8, "QBM Schur complement equals kappa_R", ok,
             f"max |schur - kappa_R| = {worst:.1e} (tol 1e-12), {n_unstable}/20 unstable, "
             f"definiteness matches sign of kappa_R", time.perf_counter() - t0)
    assert ok


def test_criterion_9_kernel_symmetry(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    t = rng.uniform(0.0, 20.0, 100)
    densities = [
        PowerLawExpCutoff(0.7, 0.5, 2.0), OHMIC, PowerLawExpCutoff(0.3, 3.0, 1.0),
        BandGap(OHMIC, 1.0, 2.0),
        Tabulated(tuple(np.linspace(0, 4, 41)), tuple(np.sin(np.linspace(0, 4, 41)) ** 2)),
    ]
    sym = 0.0
    for J in densities:
        sym = max(sym, float(np.max(np.abs(dissipation_kernel(J, -t) - np.conj(dissipation_kernel(J, t))))))
        sym = max(sym, float(np.max(np.abs(noise_kernel(J, 1.0, -t) - np.conj(noise_kernel(J, 1.0, t))))))
    rel = 0.0
    for s in (0.25, 0.5, 1.0, 2.0, 3.5):
        J = PowerLawExpCutoff(1.0, s, 1.5)
        closed = dissipation_kernel(J, t[:25], method="closed")
        quad = dissipation_kernel(J, t[:25], method="quad")
        rel = max(rel, float(np.max(np.abs(closed - quad) / np.abs(closed))))
    ok = sym < 1e-10 and rel < 1e-7
    announce(9, "kernel Hermitian symmetry and closed form", ok,
             f"max symmetry defect {sym:.1e} (tol 1e-10), closed vs quadrature rel {rel:.1e} (tol 1e-7)",
             time.perf_counter() - t0)
    assert ok


def test_criterion_10_determinism(tmp_path, announce):
    t0 = time.perf_counter()
    text = ("system.Omega = 1.0\nsystem.n0 = 1\nbath.model = power_law\nbath.alpha = 2.0\n"
            "bath.s = 0.5\nbath.omega_c = 1.0\nbath.temperature = 0.5\n"
            "grid.horizon = 20\ngrid.step = 0.01\noutputs.directory = {out}\n")
    for run in ("first", "second"):
        cfg = tmp_path / f"{run}.cfg"
        cfg.write_text(text.format(out=tmp_path / run))
        proc = subprocess.run([sys.executable, "-m", "nmosc", "simulate", "-c", str(cfg)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    same = {name: (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()
            for name in ("propagator.csv", "coefficients.csv")}
    ok = all(same.values())
    announce(10, "byte-identical CSV output", ok,
             ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}" for k, v in same.items()),
             time.perf_counter() - t0)
    assert ok
