"""Sampler tests: unitarity/orthogonality, Haar moments, hermitization."""

import numpy as np
import pytest

from haarsum import linalg
from haarsum.ensembles import (
    EnsembleSpec,
    derive_rng,
    hermitize,
    matrix_from_json,
    matrix_to_json,
    sample_haar_orthogonal,
    sample_haar_unitary,
    sample_sum,
)


class TestHaarUnitary:
    def test_unitarity(self):
        u = sample_haar_unitary(32, seed=1)
        assert np.max(np.abs(u.conj().T @ u - np.eye(32))) < 1e-12

    def test_dimension_one(self):
        u = sample_haar_unitary(1, seed=2)
        assert abs(abs(u[0, 0]) - 1.0) < 1e-14

    def test_deterministic(self):
        a = sample_haar_unitary(16, seed=99)
        b = sample_haar_unitary(16, seed=99)
        assert np.array_equal(a, b)
        c = sample_haar_unitary(16, seed=100)
        assert not np.array_equal(a, c)

    def test_second_moment_of_real_part(self):
        # mean of (1/n) tr (U+U^H)^2 equals the central binomial value 2
        n, reps = 32, 500
        vals = []
        for k in range(reps):
            u = sample_haar_unitary(n, seed=1000 + k)
            w = u + u.conj().T
            vals.append(np.real(np.trace(w @ w)) / n)
        assert 1.9 <= np.mean(vals) <= 2.1

    def test_trace_mean_is_zero(self):
        n, reps = 32, 500
        vals = np.array([
            np.trace(sample_haar_unitary(n, seed=5000 + k)) / n for k in range(reps)
        ])
        se = np.std(vals) / np.sqrt(reps)
        assert abs(np.mean(vals)) <= 3.0 * se


class TestHaarOrthogonal:
    def test_orthogonality_and_reality(self):
        o = sample_haar_orthogonal(50, seed=3)
        assert np.max(np.abs(o.imag)) == 0.0
        assert np.max(np.abs(o.T @ o - np.eye(50))) < 1e-12

    def test_determinant_is_sign(self):
        for k in range(5):
            o = sample_haar_orthogonal(13, seed=k)
            det = linalg.determinant(o)
            assert abs(abs(det) - 1.0) < 1e-10
            assert min(abs(det - 1.0), abs(det + 1.0)) < 1e-10

    def test_determinant_split_is_even(self):
        # Haar measure weights the two determinant classes equally
        reps = 2000
        plus = 0
        for k in range(reps):
            o = sample_haar_orthogonal(16, seed=20_000 + k)
            if linalg.determinant(o).real > 0:
                plus += 1
        assert 0.46 <= plus / reps <= 0.54

    def test_squared_trace_vanishes(self):
        n, reps = 64, 1000
        vals = np.array([
            np.real(np.trace(np.linalg.matrix_power(
                sample_haar_orthogonal(n, seed=40_000 + k), 2))) / n
            for k in range(reps)
        ])
        se = np.std(vals) / np.sqrt(reps)
        assert abs(np.mean(vals)) <= 2.0 / n + 3.0 * se


class TestSampleSum:
    def test_single_unitary_all_singular_values_one(self):
        spec = EnsembleSpec(n=24, d=1, d_prime=1, seed=5)
        s = sample_sum(spec)
        sv = linalg.singular_values(s)
        assert np.max(np.abs(sv - 1.0)) < 1e-10

    def test_operator_norm_bound(self):
        spec = EnsembleSpec(n=32, d=2, d_prime=1, seed=6)
        s = sample_sum(spec)
        assert linalg.singular_values(s)[0] <= 2.0 + 1e-9

    def test_replica_streams_differ(self):
        spec = EnsembleSpec(n=8, d=2, d_prime=2, seed=7)
        a = sample_sum(spec, replica=0)
        b = sample_sum(spec, replica=1)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, sample_sum(spec, replica=0))

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError):
            EnsembleSpec(n=0, d=1, d_prime=0, seed=1)
        with pytest.raises(ValueError):
            EnsembleSpec(n=4, d=1, d_prime=2, seed=1)
        with pytest.raises(ValueError):
            EnsembleSpec(n=4, d=0, d_prime=0, seed=1)


class TestHermitize:
    def test_identity_zero_shift(self):
        h = hermitize(np.eye(5, dtype=complex), 0.0)
        lam = linalg.herm_eigenvalues(h)
        assert np.allclose(np.abs(lam), 1.0, atol=1e-12)

    def test_zero_matrix_shift_two(self):
        h = hermitize(np.zeros((4, 4), dtype=complex), 2.0)
        lam = linalg.herm_eigenvalues(h)
        assert np.allclose(np.abs(lam), 2.0, atol=1e-12)

    def test_exactly_hermitian(self):
        rng = np.random.default_rng(8)
        m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        h = hermitize(m, 0.3 + 0.1j)
        assert linalg.hermitian_defect(h)[0] == 0.0

    def test_spectrum_negation_symmetric(self):
        rng = np.random.default_rng(9)
        m = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        lam = linalg.herm_eigenvalues(hermitize(m, 0.5 - 0.2j))
        assert np.max(np.abs(np.sort(lam) + np.sort(-lam)[::-1])) < 1e-9

    def test_matches_singular_values(self):
        # multiset {eigenvalues of hermitize(S, v)} = {+/- singular values}
        spec = EnsembleSpec(n=16, d=3, d_prime=2, seed=10)
        s = sample_sum(spec)
        v = 0.4 + 0.7j
        lam = linalg.herm_eigenvalues(hermitize(s, v))
        sv = linalg.singular_values(s - v * np.eye(16))
        both = np.sort(np.concatenate([sv, -sv]))
        assert np.max(np.abs(lam - both)) < 1e-9


class TestSeedingAndJson:
    def test_distinct_summand_streams(self):
        # d=2 sum with equal summand seeds would collapse to 2 * (summand 0)
        spec = EnsembleSpec(n=12, d=2, d_prime=2, seed=11)
        s = sample_sum(spec)
        u0 = derive_rng(11, 0)
        u1 = derive_rng(11, 1)
        assert not np.array_equal(u0.standard_normal(4), u1.standard_normal(4))
        first = sample_sum(EnsembleSpec(n=12, d=1, d_prime=1, seed=11))
        assert np.max(np.abs(s - 2.0 * first)) > 0.1

    def test_json_roundtrip(self):
        rng = np.random.default_rng(13)
        m = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        back = matrix_from_json(matrix_to_json(m))
        assert np.array_equal(m, back)


class TestHaarInvariance:
    def test_conjugation_invariance_of_singular_esd(self):
        # singular ESD of U - rI matches that of WUW^H - rI across 50 reps
        n, reps, r = 24, 50, 0.6
        pooled_a, pooled_b = [], []
        for k in range(reps):
            u = sample_haar_unitary(n, seed=60_000 + k)
            w = sample_haar_unitary(n, seed=70_000 + k)
            m1 = u - r * np.eye(n)
            m2 = w @ u @ w.conj().T - r * np.eye(n)
            pooled_a.append(linalg.singular_values(m1))
            pooled_b.append(linalg.singular_values(m2))
        a = np.sort(np.concatenate(pooled_a))
        b = np.sort(np.concatenate(pooled_b))
        # two-sample KS on the pooled singular values
        grid = np.union1d(a, b)
        fa = np.searchsorted(a, grid, side="right") / len(a)
        fb = np.searchsorted(b, grid, side="right") / len(b)
        ks = np.max(np.abs(fa - fb))
        assert ks < 1.63 * np.sqrt((len(a) + len(b)) / (len(a) * len(b)))


class TestLimitAgreement:
    def test_singular_esd_matches_limit_density(self):
        # two-summand sample at n=256 against the closed-form singular law
        from haarsum.closed_forms import abs_sd_measure
        from haarsum.measures import ks_distance, esd_from_reals
        spec = EnsembleSpec(n=256, d=2, d_prime=2, seed=77)
        sv = linalg.singular_values(sample_sum(spec))
        assert ks_distance(esd_from_reals(sv), abs_sd_measure(2)) <= 0.05
