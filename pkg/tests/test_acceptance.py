"""Acceptance criteria, one test per criterion, printed as a pass/fail table.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the table lines.
Every tolerance below is pinned; Monte Carlo draws are seeded so the whole
module is deterministic.
"""

import math
import time

import numpy as np
import pytest

from haarsum import linalg
from haarsum.brown_girko import (
    BumpSpec,
    brown_from_potential,
    girko_identity_check,
    radial_symmetry_check,
)
from haarsum.closed_forms import (
    brown_density_h_d,
    density_abs_sd,
    radial_cdf_F_d,
    stieltjes_G1,
)
from haarsum.ensembles import EnsembleSpec, sample_haar_orthogonal, sample_haar_unitary, sample_sum
from haarsum.measures import SpectralMeasure, esd_from_reals, ks_distance
from haarsum.ortho_weyl import ortho_limit_check, weyl_G1_orthogonal
from haarsum.schwinger_dyson import (
    invert_to_density,
    stieltjes_of_measure,
    theta_recursion,
)
from haarsum.singular_stats import (
    AtomicDiagSpec,
    good_event_frequency,
    log_ui_profile,
    single_ring_demo,
)

from oracles import eig_oracle, random_complex, random_hermitian, spectrum_set_distance
from test_closed_forms import stieltjes_oracle


def report(num, name, ok, detail, t0):
    status = "PASS" if ok else "FAIL"
    print(f"\n[criterion {num:>2}] {status}  {name}: {detail}  ({time.time() - t0:.0f}s)")
    assert ok, f"criterion {num} ({name}): {detail}"


def stencil_radii(d, total=40):
    """Radii in (0.1 sqrt d, 0.9 sqrt d) on an h/2 lattice, clear of the
    exceptional margin around r = 1 including the stencil reach."""
    h = 0.02 * math.sqrt(d)
    margin = 0.05 + 2.0 * h + 1e-6
    lo, hi = 0.1 * math.sqrt(d), 0.9 * math.sqrt(d)
    lattice = np.arange(lo + 0.25 * h, hi, 0.5 * h)
    lattice = lattice[np.abs(lattice - 1.0) >= margin]
    idx = np.linspace(0, len(lattice) - 1, total).round().astype(int)
    return np.unique(lattice[np.unique(idx)])


def fold_to_positive(m):
    """Positive-half law of a symmetric grid density."""
    pos = m.grid >= 0.0
    grid = m.grid[pos]
    vals = m.values[pos] + np.interp(-grid, m.grid, m.values, left=0.0, right=0.0)
    return SpectralMeasure.from_density(grid, vals, check_mass=False)


def test_criterion_01_brown_reconstruction():
    t0 = time.time()
    stats = {}
    for d in (2, 3):
        radii = stencil_radii(d, total=40)
        assert len(radii) >= 40
        prof = brown_from_potential(d, radii)
        ref = brown_density_h_d(d, prof.r_grid)
        rel = np.abs(prof.values - ref) / ref
        stats[d] = (float(np.median(rel)), float(np.max(rel)))
    elapsed = time.time() - t0
    ok = all(med <= 0.05 and mx <= 0.12 for med, mx in stats.values()) \
        and elapsed <= 600.0
    detail = "; ".join(
        f"d={d}: median {med:.2%}, max {mx:.2%}" for d, (med, mx) in stats.items()
    ) + f"; runtime {elapsed:.0f}s<=600s"
    report(1, "brown reconstruction vs planar density", ok, detail, t0)


def test_criterion_02_recursion_vs_closed_form():
    t0 = time.time()
    sups = {}
    for d in (2, 3):
        b = 2.0 * math.sqrt(d - 1.0)
        grid = np.linspace(-(b + 0.6), b + 0.6, 4001)
        m = invert_to_density(theta_recursion(d, 0.0), grid)
        ref = 0.5 * density_abs_sd(d, np.abs(m.grid))
        mask = np.abs(np.abs(m.grid) - b) > 0.05
        sups[d] = float(np.max(np.abs(m.values - ref)[mask]))
    elapsed = time.time() - t0
    ok = all(s <= 1e-2 for s in sups.values()) and elapsed <= 120.0
    detail = "; ".join(f"d={d}: sup {s:.2e}" for d, s in sups.items()) \
        + f"; runtime {elapsed:.0f}s<=120s"
    report(2, "free-convolution recursion vs closed form", ok, detail, t0)


def test_criterion_03_monte_carlo_vs_analytic_singular_law():
    t0 = time.time()
    n, d, reps = 512, 2, 10
    results = {}
    for v in (0.0, 0.5, 1.3 + 0.2j):
        spec = EnsembleSpec(n=n, d=d, d_prime=d, seed=1000)
        pooled = []
        eye = np.eye(n)
        for k in range(reps):
            s = sample_sum(spec, replica=k)
            pooled.append(linalg.singular_values(s - v * eye))
        emp = esd_from_reals(np.concatenate(pooled))
        r = abs(v)
        span = d + r + 0.5
        grid = np.linspace(-span, span, 4001)
        analytic = fold_to_positive(invert_to_density(theta_recursion(d, v), grid))
        results[v] = ks_distance(emp, analytic)
    elapsed = time.time() - t0
    ok = all(ks <= 0.05 for ks in results.values()) and elapsed <= 300.0
    detail = "; ".join(f"v={v}: KS {ks:.3f}" for v, ks in results.items()) \
        + f"; runtime {elapsed:.0f}s<=300s"
    report(3, "Monte Carlo vs analytic singular law", ok, detail, t0)


def test_criterion_04_radial_eigenvalue_law():
    t0 = time.time()
    n, reps = 512, 10
    spec = EnsembleSpec(n=n, d=2, d_prime=2, seed=2000)
    moduli = []
    for k in range(reps):
        moduli.append(np.abs(linalg.general_eigenvalues(sample_sum(spec, replica=k))))
    moduli = np.concatenate(moduli)
    frac1 = float(np.mean(moduli <= 1.0))
    frac12 = float(np.mean(moduli <= 1.2))
    want1 = radial_cdf_F_d(2, 1.0)
    want12 = radial_cdf_F_d(2, 1.2)
    ok = abs(frac1 - want1) <= 0.03 and abs(frac12 - want12) <= 0.03
    detail = (f"P(|l|<=1): {frac1:.4f} vs {want1:.4f}; "
              f"P(|l|<=1.2): {frac12:.4f} vs {want12:.4f} (tol 0.03)")
    report(4, "radial eigenvalue law", ok, detail, t0)


def test_criterion_05_girko_identity():
    t0 = time.time()
    gaps = []
    for seed in range(5):
        s = sample_sum(EnsembleSpec(n=8, d=2, d_prime=2, seed=3000 + seed))
        gaps.append(girko_identity_check(s, BumpSpec(0.0, 3.0), quad_n=120).gap)
    elapsed = time.time() - t0
    ok = max(gaps) <= 1e-2 and elapsed <= 120.0
    detail = f"max gap {max(gaps):.2e} over 5 seeds; runtime {elapsed:.0f}s<=120s"
    report(5, "planar/log identity at finite n", ok, detail, t0)


def test_criterion_06_base_closed_form():
    t0 = time.time()
    rng = np.random.default_rng(4000)
    pts = rng.uniform(-3, 3, 50) + 1j * rng.uniform(0.3, 5.0, 50)
    worst = 0.0
    for r in (0.5, 1.0, 1.7):
        vals = stieltjes_G1(r, pts)
        worst = max(worst, max(abs(vals[i] - stieltjes_oracle(r, pts[i]))
                               for i in range(len(pts))))
    z = rng.uniform(-4, 4, 200) + 1j * np.exp(rng.uniform(np.log(1e-3), np.log(10), 200))
    exact_r0 = np.array_equal(stieltjes_G1(0.0, z), z / (z * z - 1.0))
    ok = worst <= 1e-8 and exact_r0
    detail = f"quadrature-oracle gap {worst:.2e} (tol 1e-8); r=0 exact: {exact_r0}"
    report(6, "base closed-form transform", ok, detail, t0)


def test_criterion_07_orthogonal_weyl_route():
    t0 = time.time()
    n, reps = 11, 2000
    pairs = ((0.5, 0.3 + 0.5j), (0.0, 0.8 + 0.2j), (1.0, 0.5 + 0.4j),
             (1.3 + 0.2j, 0.4 + 0.6j), (2.0, 1.0 + 1.0j))
    eye = np.eye(n)
    samples = [sample_haar_orthogonal(n, seed=5000 + k) for k in range(reps)]
    all_within = True
    details = []
    for v, z in pairs:
        vals = np.empty(reps, dtype=complex)
        for k, o in enumerate(samples):
            sv = linalg.singular_values(o - v * eye)
            vals[k] = np.mean(z / (z * z - sv ** 2))
        target = weyl_G1_orthogonal(n, v, z)
        # the rounding floor covers v=0, where every singular value is
        # exactly 1 and the standard error degenerates to zero
        se_re = max(vals.real.std(ddof=1) / math.sqrt(reps), 1e-12)
        se_im = max(vals.imag.std(ddof=1) / math.sqrt(reps), 1e-12)
        within = (abs(vals.real.mean() - target.real) <= 3 * se_re
                  and abs(vals.imag.mean() - target.imag) <= 3 * se_im)
        all_within &= within
        details.append(f"v={v}: {'ok' if within else 'off'}")
    rep = ortho_limit_check(0.5, 0.4 + 0.3j, n_list=(11, 31, 101))
    ok = all_within and rep.decreasing and rep.gaps[-1] <= 0.02
    detail = ("3SE at 5 pairs: " + ", ".join(details)
              + f"; gaps {'/'.join(f'{g:.4f}' for g in rep.gaps)} decreasing={rep.decreasing}")
    report(7, "orthogonal Weyl route", ok, detail, t0)


def test_criterion_08_sampler_moment_suite():
    t0 = time.time()
    n, reps = 32, 500
    us = [sample_haar_unitary(n, seed=6000 + k) for k in range(reps)]
    ok = True
    details = []
    powers = {1: us, }
    for k in (2, 3, 4):
        powers[k] = [a @ b for a, b in zip(powers[k - 1], us)] if k > 1 else us
    for k in (1, 2, 3, 4):
        tr = np.array([np.trace(m) / n for m in powers[k]])
        se = max(tr.real.std(ddof=1), tr.imag.std(ddof=1)) / math.sqrt(reps)
        good = abs(tr.mean()) <= 3 * se
        ok &= good
        details.append(f"tr U^{k}: |{abs(tr.mean()):.4f}|<=3SE={3 * se:.4f} {'ok' if good else 'off'}")
    for k, want in ((2, 2.0), (4, 6.0)):
        vals = []
        for u in us:
            w = u + u.conj().T
            wk = w @ w if k == 2 else (w @ w) @ (w @ w)
            vals.append(float(np.real(np.trace(wk))) / n)
        got = float(np.mean(vals))
        good = abs(got - want) <= 0.05 * want
        ok &= good
        details.append(f"tr(U+U*)^{k}: {got:.3f} vs {want} {'ok' if good else 'off'}")
    plus = sum(1 for k in range(2000)
               if linalg.determinant(sample_haar_orthogonal(16, seed=7000 + k)).real > 0)
    split = plus / 2000
    good = 0.46 <= split <= 0.54
    ok &= good
    details.append(f"det split {split:.3f}")
    report(8, "sampler moment suite", ok, "; ".join(details), t0)


def test_criterion_09_stieltjes_contract_suite():
    t0 = time.time()
    rng = np.random.default_rng(8000)
    z = rng.uniform(-6, 6, 500) + 1j * np.exp(rng.uniform(np.log(1e-2), np.log(10), 500))
    shifts = (0.0, 0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0,
              0.5 + 0.5j, 1.3 + 0.2j, 0.9j, 2.5)
    worst_leak = 0.0
    worst_resid = 0.0
    decay_ok = sym_ok = True
    far = np.abs(z) >= 10.0
    for d in (1, 2, 3, 4):
        for i, v in enumerate(shifts):
            # analytic route
            g = theta_recursion(d, v)
            vals = g(z)
            worst_leak = max(worst_leak, float(np.max(vals.imag)))
            if d > 1:
                worst_resid = max(worst_resid, float(np.max(g.last_residuals)))
            decay_ok &= bool(np.all(np.abs(vals[far] - 1.0 / z[far])
                                    <= 2.0 / np.abs(z[far]) ** 2))
            sym_ok &= bool(np.max(np.abs(g(-np.conj(z)) + np.conj(vals))) <= 1e-9)
            # Monte Carlo route: symmetrized singular ESD of one sample
            spec = EnsembleSpec(n=128, d=d, d_prime=d, seed=8100 + 13 * d + i)
            sv = linalg.singular_values(sample_sum(spec) - complex(v) * np.eye(128))
            emp = stieltjes_of_measure(esd_from_reals(np.concatenate([sv, -sv])))
            evals = emp(z)
            worst_leak = max(worst_leak, float(np.max(evals.imag)))
            decay_ok &= bool(np.all(np.abs(evals[far] - 1.0 / z[far])
                                    <= 2.0 / np.abs(z[far]) ** 2))
            sym_ok &= bool(np.max(np.abs(emp(-np.conj(z)) + np.conj(evals))) <= 1e-9)
    ok = worst_leak <= 1e-9 and worst_resid <= 1e-10 and decay_ok and sym_ok
    detail = (f"Im leak {worst_leak:.1e}<=1e-9; residual {worst_resid:.1e}<=1e-10; "
              f"decay {decay_ok}; symmetry {sym_ok} (d<=4, 12 shifts, both routes)")
    report(9, "Stieltjes contract property suite", ok, detail, t0)


def test_criterion_10_step2_shadows():
    t0 = time.time()
    spec = EnsembleSpec(n=128, d=2, d_prime=2, seed=9000)
    rep = log_ui_profile(spec, v=0.5, eps_list=(0.2, 0.1, 0.05), reps=100)
    decreasing = all(a >= b for a, b in zip(rep.means, rep.means[1:]))
    ospec = EnsembleSpec(n=128, d=2, d_prime=0, seed=9100)
    freq = good_event_frequency(ospec, reps=200)
    ok = decreasing and rep.fit_constant <= 10.0 and freq >= 0.95
    detail = (f"means {'/'.join(f'{m:.4f}' for m in rep.means)} decreasing={decreasing}; "
              f"C={rep.fit_constant:.2f}<=10; good-event freq {freq:.3f}>=0.95")
    report(10, "truncated-log and good-event shadows", ok, detail, t0)


def test_criterion_11_single_ring_demo():
    t0 = time.time()
    spec = AtomicDiagSpec(atoms=((0.5, 0.5), (2.0, 0.5)), n=256)
    rep = single_ring_demo(spec, reps=20, seed=11000)
    no_inner = bool(np.min(rep.moduli) > 0.3)
    ok = no_inner and rep.ks_window <= 0.07
    detail = (f"min |eig| {np.min(rep.moduli):.3f}>0.3 (inverse-square moment "
              f"{rep.inverse_square_moment:.3f} finite); radial KS {rep.ks_window:.3f}<=0.07")
    report(11, "single-ring product demo", ok, detail, t0)


def test_criterion_12_eigensolver_oracle_suite():
    t0 = time.time()
    rng = np.random.default_rng(12000)
    worst = 0.0
    for i in range(200):
        n = int(rng.integers(2, 7))
        if i % 2 == 0:
            a = random_hermitian(rng, n)
            lam = linalg.herm_eigenvalues(a).astype(complex)
        else:
            a = random_complex(rng, n)
            lam = linalg.general_eigenvalues(a)
        worst = max(worst, spectrum_set_distance(lam, eig_oracle(a)))
    inv_ok = True
    a = random_hermitian(rng, 256)
    lam = linalg.herm_eigenvalues(a)
    inv_ok &= abs(lam.sum() - np.real(np.trace(a))) <= 1e-9 * 256 * max(1, np.max(np.abs(lam)))
    inv_ok &= abs((lam ** 2).sum() - np.linalg.norm(a) ** 2) <= 1e-9 * np.linalg.norm(a) ** 2
    b = random_complex(rng, 256, scale=0.2)
    ev = linalg.general_eigenvalues(b)
    inv_ok &= abs(ev.sum() - np.trace(b)) <= 1e-9 * 256 * max(1.0, np.linalg.norm(b))
    ok = worst <= 1e-7 and inv_ok
    detail = f"set distance {worst:.2e}<=1e-7 over 200 matrices; invariants at n=256: {inv_ok}"
    report(12, "eigensolver oracle suite", ok, detail, t0)
