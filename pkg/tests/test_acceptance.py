"""Acceptance criteria 1 to 10, one test each.

Every test records a single pass/fail line that is printed in the pytest
terminal summary. Run just this module with

    pytest tests/test_acceptance.py -v
"""

import math
import time

import numpy as np

from ssh_rabi.band import (EQUILIBRIUM, INVERTED, SAMPLE_PARAMS, Branch, band_sample, k_grid,
                           quasiparticle_energy)
from ssh_rabi.groundstate import (energy_elliptic, energy_quadrature, minimize_dimerization,
                                  well_profile)
from ssh_rabi.rabi import (ConstantCoupling, CosineCoupling, CosineDispersion, TubeConfig,
                           build_initial_packet, circulant_modes, evolve, gaussian_envelope,
                           make_h_grid, shift_matrix, simulate)
from ssh_rabi.spectra import load_fixtures, regularity_report
from ssh_rabi.stability import condition_third


def test_criterion_01_elliptic_equals_quadrature(criterion):
    p = SAMPLE_PARAMS
    start = time.perf_counter()
    worst = 0.0
    for z in (0.05, 0.1, 0.2, 0.3, 0.5, 0.8):
        u = z * p.t0 / (2 * p.alpha)
        quad = energy_quadrature(p, u)
        worst = max(worst, abs(energy_elliptic(p, u) - quad) / abs(quad))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 5.0
    criterion(1, ok, f"elliptic vs quadrature: worst rel {worst:.2e} (< 1e-8), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_criterion_02_u_zero_closed_form(criterion):
    p = SAMPLE_PARAMS
    expected = 4 * p.N * p.t0 / math.pi
    errs = [abs(fn(p, 0.0) - expected) / expected for fn in (energy_quadrature, energy_elliptic)]
    ok = max(errs) < 1e-10
    criterion(2, ok, f"u = 0 gives 4 N t0 / pi: rel errors {errs[0]:.1e}, {errs[1]:.1e} (< 1e-10)")
    assert ok


def test_criterion_03_ssh_branch_exclusion(criterion):
    p = SAMPLE_PARAMS.with_u(0.05)
    s = band_sample(p, k_grid(p, 2048), Branch.SSH)
    gapped = s.E > 0
    eq = condition_third(s, EQUILIBRIUM)[gapped]
    inv = condition_third(s, INVERTED)[gapped]
    ok = gapped.sum() == 2048 and not eq.any() and inv.all()
    criterion(3, ok, f"SSH branch cond3 over {gapped.sum()} points: "
                     f"equilibrium true at {eq.mean():.0%}, inverted true at {inv.mean():.0%}")
    assert ok


def test_criterion_04_diagonal_form(criterion):
    p = SAMPLE_PARAMS.with_u(0.05)
    k = k_grid(p, 2048)
    worst = {}
    for branch in Branch:
        s = band_sample(p, k, branch)
        oracle = (s.eps * (s.alpha_k**2 - s.beta_k**2)
                  + 2 * s.alpha_k * s.beta_k * np.abs(s.gap))
        worst[branch.value] = float(np.max(np.abs(quasiparticle_energy(p, k, branch) - oracle)))
    ok = max(worst.values()) < 1e-12
    criterion(4, ok, "diagonal-form oracle: max |diff| "
                     + ", ".join(f"{b} {w:.1e}" for b, w in worst.items()) + " (< 1e-12)")
    assert ok


def test_criterion_05_double_well(criterion):
    p = SAMPLE_PARAMS
    start = time.perf_counter()
    res = minimize_dimerization(p)
    grid = np.linspace(0.15 / 10_000, 0.15, 10_000)
    values = well_profile(p, grid)
    i = int(np.argmin(values))
    elapsed = time.perf_counter() - start
    asym = abs(energy_elliptic(p, res.u0) - energy_elliptic(p, -res.u0))
    cell = grid[1] - grid[0]
    ok = (res.u0 > 0 and res.well_depth > 0 and asym <= 1e-10
          and 0 < i < grid.size - 1 and abs(res.u0 - grid[i]) <= cell and elapsed < 10.0)
    criterion(5, ok, f"double well: u0 = {res.u0:.6f} A, depth {res.well_depth:.4f} eV, "
                     f"|E(u0)-E(-u0)| = {asym:.1e}, grid scan u = {grid[i]:.6f} "
                     f"(cell {cell:.1e}), {elapsed:.2f} s (< 10 s)")
    assert ok


def _tube(n, g, l, kappa, theta=None, size=4096, extent=40.96):
    return TubeConfig(n=n, g=g, l=l, theta_profile=theta or CosineDispersion(interchain=0.2),
                      kappa_profile=kappa, h_grid=make_h_grid(size, extent))


def test_criterion_06_unitarity_and_composition(criterion):
    cfg = _tube(4, 1.0, 3, CosineCoupling(interchain=0.1))
    state = build_initial_packet(cfg, gaussian_envelope(0.5, 0.2, n=4))
    stepped = state
    for _ in range(1000):
        stepped = evolve(stepped, cfg, 0.1)
    drift = abs(stepped.norm() - state.norm()) / state.norm()
    composed = evolve(evolve(state, cfg, 3.7), cfg, 5.1)
    direct = evolve(state, cfg, 8.8)
    comp = float(np.max(np.abs(composed.spectral - direct.spectral)))
    ok = drift < 1e-10 and comp < 1e-12
    criterion(6, ok, f"unitarity: norm drift {drift:.1e} over 1000 steps (< 1e-10), "
                     f"composition error {comp:.1e} (< 1e-12)")
    assert ok


def _dominant(cfg, n):
    _, spectrum = simulate(cfg, gaussian_envelope(0.5, 0.2, n=n), 800.0, 4.0)
    return spectrum.dominant_frequency, spectrum.resolution


def test_criterion_07_rabi_linearity(criterion):
    n, g0 = 4, 0.5
    start = time.perf_counter()

    gs = np.array([g0, 2 * g0, 4 * g0])
    freqs, bins = zip(*(_dominant(_tube(n, g, 2, CosineCoupling(interchain=0.1)), n) for g in gs))
    freqs = np.array(freqs)
    slope = float(gs @ freqs / (gs @ gs))
    residual = float(np.max(np.abs(freqs - slope * gs) / (slope * gs)))

    ls = np.array([2, 3, 5])
    roots = np.sqrt(ls - 1.0)
    kappa = ConstantCoupling(1.0, interchain=0.1)
    lf, lbins = zip(*(_dominant(_tube(n, g0, int(l), kappa), n) for l in ls))
    lf = np.array(lf)
    coeff = float(roots @ lf / (roots @ roots))
    fit_dev = np.abs(lf - coeff * roots)
    # kappa mode eigenvalue 1 (q = 1, 3) carries the dominant flopping
    analytic = 2 * g0 * 1.0 * roots / (2 * np.pi)
    analytic_dev = np.abs(lf - analytic)
    elapsed = time.perf_counter() - start

    ok = (residual < 0.02 and np.all(fit_dev <= lbins[0]) and np.all(analytic_dev <= lbins[0])
          and elapsed < 60.0)
    criterion(7, ok, f"linearity: f(g) = {np.round(freqs, 5).tolist()} Hz, zero-intercept "
                     f"residual {residual:.2%} (< 2%); f(l) = {np.round(lf, 5).tolist()} Hz, "
                     f"max dev from sqrt(l-1) fit {fit_dev.max():.5f}, from analytic "
                     f"{analytic_dev.max():.5f} (bin {lbins[0]:.5f}); n = {n}, 4096-point grid, "
                     f"{elapsed:.1f} s (< 60 s)")
    assert ok


def test_criterion_08_circulant_algebra(criterion):
    worst_power, worst_phase = 0.0, 0.0
    for n in (2, 3, 5, 8):
        eigenvalues, phases = circulant_modes(n)
        vecs = phases / math.sqrt(n)
        power = vecs @ np.diag(eigenvalues**n) @ vecs.conj().T
        worst_power = max(worst_power, float(np.max(np.abs(power - np.eye(n)))))
        S = shift_matrix(n)
        explicit_vals, explicit_vecs = np.linalg.eig(S)
        for val, vec in zip(explicit_vals, explicit_vecs.T):
            q = int(np.argmin(np.abs(eigenvalues - val)))
            # explicit eigenvector equals the mode phase column up to a global phase
            overlap = abs(np.vdot(vecs[:, q], vec))
            worst_phase = max(worst_phase, abs(overlap - 1.0), abs(val - eigenvalues[q]))
    ok = worst_power < 1e-13 and worst_phase < 1e-12
    criterion(8, ok, f"circulant: max |[e1]^n - I| {worst_power:.1e} (< 1e-13), mode phases vs "
                     f"explicit diagonalization {worst_phase:.1e}")
    assert ok


def test_criterion_09_regularity_report(criterion):
    start = time.perf_counter()
    report = regularity_report(load_fixtures())
    elapsed = time.perf_counter() - start
    graded = [c for c in report.checks if c.passed is not None]
    ok = report.all_passed and elapsed < 1.0
    criterion(9, ok, f"spectra-check: {sum(c.passed for c in graded)}/{len(graded)} checks pass "
                     f"({', '.join(c.name for c in report.failures) or 'no failures'}), "
                     f"{elapsed * 1000:.0f} ms (< 1 s)")
    assert ok


def test_criterion_10_absolute_frequencies_not_reproduced(criterion):
    # Absolute Raman frequencies are not simulator outputs: the experimental
    # couplings are unknown. What is checkable is encoded in criteria 7 and 9.
    names = [c.name for c in regularity_report(load_fixtures()).checks]
    encoded = any(n.startswith("ratio") for n in names) and any(n.startswith("shift") for n in names)
    criterion(10, encoded, "absolute Raman frequencies from the simulator: not reproducible at "
                           "desk scale (no experimental couplings); covered only by the ratio, "
                           "shift and linearity property checks")
    assert encoded
