"""Independent oracles shared by the test suite.

Everything here is deliberately brute-force and disjoint from the library
implementation: characteristic polynomials by recursive Laplace expansion,
polynomial roots by Durand-Kerner iteration (no companion matrix, no
eigensolver), and matching-based set distances for spectra.
"""

import itertools

import numpy as np


def char_poly_coeffs(a):
    """Coefficients of det(xI - A), highest degree first, by Laplace expansion.

    Exponential cost; intended for n <= 8.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    # polynomial entries of xI - A, each as a coefficient array (low->high)
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                entries[i][j] = np.array([-a[i, j], 1.0], dtype=np.complex128)
            else:
                entries[i][j] = np.array([-a[i, j]], dtype=np.complex128)

    def poly_det(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        total = np.zeros(1, dtype=np.complex128)
        r0 = rows[0]
        for k, c in enumerate(cols):
            minor = poly_det(rows[1:], cols[:k] + cols[k + 1:])
            term = np.convolve(entries[r0][c], minor)
            if k % 2 == 1:
                term = -term
            m = max(len(total), len(term))
            total = np.pad(total, (0, m - len(total)))
            total = total + np.pad(term, (0, m - len(term)))
        return total

    low_to_high = poly_det(tuple(range(n)), tuple(range(n)))
    return low_to_high[::-1].copy()


def durand_kerner_roots(coeffs, max_iter=600, tol=1e-14):
    """All roots of a polynomial given coefficients highest-first.

    Weierstrass/Durand-Kerner simultaneous iteration started on a scaled
    circle with an irrational angular offset.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    c = c / c[0]
    n = len(c) - 1
    if n == 0:
        return np.empty(0, dtype=np.complex128)
    radius = 1.0 + np.max(np.abs(c[1:]))
    angles = 2.0 * np.pi * (np.arange(n) / n + 0.2837)
    z = radius * np.exp(1j * angles) * (0.4 + 0.9j) / abs(0.4 + 0.9j)
    scale = max(1.0, radius)
    for _ in range(max_iter):
        p = np.polyval(c, z)
        denom = np.ones_like(z)
        for k in range(n):
            diff = z[k] - np.delete(z, k)
            denom[k] = np.prod(diff)
        step = p / denom
        z = z - step
        if np.max(np.abs(step)) < tol * scale:
            break
    return z


def spectrum_set_distance(a, b):
    """min over pairings of the max pointwise distance between two spectra.

    Exact (over permutations) for n <= 7, greedy otherwise.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    assert a.shape == b.shape
    n = len(a)
    if n <= 7:
        best = np.inf
        for perm in itertools.permutations(range(n)):
            dist = np.max(np.abs(a - b[list(perm)]))
            if dist < best:
                best = dist
        return float(best)
    a = np.sort_complex(a)
    b = np.sort_complex(b)
    return float(np.max(np.abs(a - b)))


def eig_oracle(a):
    """Eigenvalues via the expanded characteristic polynomial."""
    return durand_kerner_roots(char_poly_coeffs(a))


def random_complex(rng, n, scale=1.0):
    """Dense complex matrix with independent standard normal re/im parts."""
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_hermitian(rng, n, scale=1.0):
    a = random_complex(rng, n, scale)
    return 0.5 * (a + a.conj().T)
