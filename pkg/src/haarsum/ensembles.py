"""Haar-distributed unitary/orthogonal sampling and hermitized sums.

Sampling is Ginibre + QR with the R-diagonal phase correction, which makes
the output exactly Haar rather than merely approximately so.  Reproducibility
is per-(seed, index): sub-streams for summands and replicas are derived with
``numpy.random.SeedSequence(seed, spawn_key=index_path)`` feeding a Philox
counter generator, so parallel sampling needs no shared RNG state.
"""

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnsembleSpec:
    """How to build the random sum: dimension, summand counts, seed.

    ``d`` is the total number of Haar summands, the first ``d_prime`` of them
    unitary and the remaining ``d - d_prime`` real orthogonal.
    """

    n: int
    d: int
    d_prime: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.d < 1:
            raise ValueError(f"summand count must be >= 1, got {self.d}")
        if not 0 <= self.d_prime <= self.d:
            raise ValueError(
                f"unitary count must satisfy 0 <= d_prime <= d, got "
                f"d_prime={self.d_prime}, d={self.d}"
            )


def derive_rng(seed, *path):
    """Counter-based generator for stream (seed, *path).

    The mixing function is fixed and documented: a ``SeedSequence`` with
    ``entropy=seed`` and ``spawn_key=path`` keys a Philox generator.
    Distinct paths give statistically independent streams; identical
    (seed, path) pairs reproduce bit-identical draws.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def _haar_unitary(n, rng):
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r).copy()
    diag = np.where(np.abs(diag) > 0.0, diag, 1.0)
    # make the implicit R-diagonal positive real; Q picks up the phases
    return q * (diag / np.abs(diag))


def _haar_orthogonal(n, rng):
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r).copy()
    diag = np.where(diag != 0.0, diag, 1.0)
    return (q * np.sign(diag)).astype(np.complex128)


def sample_haar_unitary(n, seed):
    """Haar-distributed n x n unitary matrix, deterministic in (n, seed)."""
    return _haar_unitary(n, derive_rng(seed))


def sample_haar_orthogonal(n, seed):
    """Haar-distributed n x n orthogonal matrix as a complex array.

    Real entries stored with zero imaginary parts so downstream code sees a
    single matrix type; determinant is +1 or -1 with equal probability.
    """
    return _haar_orthogonal(n, derive_rng(seed))


def sample_sum(spec, replica=None):
    """Sum of ``spec.d`` independent Haar matrices per ``spec``.

    Summand i draws from the sub-stream (seed, i) -- or (seed, replica, i)
    when a replica index is given -- so Monte Carlo replicas are independent
    and individually reproducible.
    """
    path = () if replica is None else (replica,)
    s = np.zeros((spec.n, spec.n), dtype=np.complex128)
    for i in range(spec.d):
        rng = derive_rng(spec.seed, *path, i)
        if i < spec.d_prime:
            s += _haar_unitary(spec.n, rng)
        else:
            s += _haar_orthogonal(spec.n, rng)
    return s


def hermitize(m, v=0.0):
    """2n x 2n Hermitian block matrix [[0, m - vI], [(m - vI)^H, 0]].

    Its spectrum is +/- the singular values of ``m - vI``.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"hermitize needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if not np.isfinite(complex(v).real) or not np.isfinite(complex(v).imag):
        raise ValueError("shift v must be finite")
    shifted = m - complex(v) * np.eye(n)
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    h[:n, n:] = shifted
    h[n:, :n] = shifted.conj().T
    return h


def matrix_to_json(m):
    """Serialize a matrix as JSON (dimensions plus row-major re/im lists)."""
    m = np.asarray(m, dtype=np.complex128)
    return json.dumps({
        "n_rows": int(m.shape[0]),
        "n_cols": int(m.shape[1]),
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    })


def matrix_from_json(text):
    """Inverse of :func:`matrix_to_json`."""
    obj = json.loads(text)
    shape = (obj["n_rows"], obj["n_cols"])
    re = np.asarray(obj["re"], dtype=float).reshape(shape)
    im = np.asarray(obj["im"], dtype=float).reshape(shape)
    return re + 1j * im
