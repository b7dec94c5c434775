"""Monte Carlo statistics of extreme singular values and the product demo.

Numerical shadows of the integrability machinery: empirical tail reports
for the smallest singular value of the shifted sum, truncated-log profiles
near zero, the frequency of the good event pinning the extreme singular
values, and a planar single-ring demonstration for a Haar unitary times an
atomic positive diagonal, cross-validated against the free-convolution
route.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .brown_girko import inversion_grid, radial_laplacian_profile
from .ensembles import derive_rng, sample_sum, _haar_unitary
from .measures import SpectralMeasure, esd_from_reals, ks_distance, log_moment, LogMomentWindow
from .schwinger_dyson import (
    SubordinationParams,
    free_bernoulli_convolve,
    invert_to_density,
    MirrorEvaluator,
    stieltjes_of_measure,
)


@dataclass(frozen=True)
class AtomicDiagSpec:
    """Positive diagonal with [n p_i] entries equal to x_i.

    Entry counts come from largest-remainder rounding, which is
    deterministic and sums to n exactly.
    """

    atoms: tuple
    n: int

    def __post_init__(self):
        atoms = tuple((float(x), float(p)) for x, p in self.atoms)
        if not atoms or any(x <= 0 for x, _ in atoms) or any(p <= 0 for _, p in atoms):
            raise ValueError("atoms need positive values and positive proportions")
        if abs(sum(p for _, p in atoms) - 1.0) > 1e-12:
            raise ValueError("atom proportions must sum to 1")
        if self.n < len(atoms):
            raise ValueError("dimension smaller than the number of atoms")
        object.__setattr__(self, "atoms", atoms)

    def counts(self):
        raw = [self.n * p for _, p in self.atoms]
        base = [int(math.floor(x)) for x in raw]
        short = self.n - sum(base)
        order = sorted(range(len(raw)), key=lambda i: raw[i] - base[i], reverse=True)
        for i in order[:short]:
            base[i] += 1
        return tuple(base)

    def build_diagonal(self):
        values = np.concatenate([
            np.full(c, x) for (x, _), c in zip(self.atoms, self.counts())])
        return np.diag(values.astype(np.complex128))

    def measure(self):
        return SpectralMeasure.from_atoms(self.atoms)

    def is_dirac(self):
        return len({x for x, _ in self.atoms}) == 1

    def inverse_square_moment(self):
        return sum(p / (x * x) for x, p in self.atoms)


@dataclass(frozen=True)
class TailReport:
    """Empirical exceedance of small-singular-value thresholds.

    Counts are kept as integers so the probabilities are exact rationals
    count/reps; identical (spec, seed) reruns reproduce them bit for bit.
    """

    thresholds: tuple
    counts: tuple
    reps: int
    seed: int

    @property
    def exceedance(self):
        return tuple(c / self.reps for c in self.counts)


def smin_tail(spec, v, t_list, reps=200):
    """Empirical P(s_min(S - vI) <= t) per threshold over seeded replicas."""
    if reps < 100:
        raise ValueError("need reps >= 100 for a meaningful tail estimate")
    t_list = tuple(float(t) for t in t_list)
    eye = np.eye(spec.n)
    mins = np.empty(reps)
    for k in range(reps):
        s = sample_sum(spec, replica=k)
        mins[k] = linalg.singular_values(s - complex(v) * eye)[-1]
    counts = tuple(int(np.sum(mins <= t)) for t in t_list)
    return TailReport(thresholds=t_list, counts=counts, reps=reps, seed=spec.seed)


@dataclass(frozen=True)
class LogUiReport:
    """Mean truncated |log| mass below each epsilon, with the fitted scale."""

    eps_list: tuple
    means: tuple
    fit_constant: float
    reps: int
    seed: int


def log_ui_profile(spec, v, eps_list, reps=100):
    """Mean of the |log| moment of the hermitized ESD over (0, eps).

    For each replica the hermitized spectrum is +/- the singular values of
    S - vI, so the truncated moment is (1/n) sum_{s_k <= eps} |log s_k|.
    The fitted constant is the smallest C with mean <= C eps |log eps|
    across the requested epsilons.
    """
    eps_list = tuple(float(e) for e in eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])) and len(eps_list) > 1:
        eps_list = tuple(sorted(eps_list, reverse=True))
    eye = np.eye(spec.n)
    sums = np.zeros(len(eps_list))
    for k in range(reps):
        s = sample_sum(spec, replica=k)
        sv = linalg.singular_values(s - complex(v) * eye)
        sv = np.clip(sv, 1e-300, None)
        logs = np.abs(np.log(sv))
        for i, eps in enumerate(eps_list):
            sums[i] += float(np.sum(logs[sv <= eps])) / spec.n
    means = tuple(sums / reps)
    cs = [m / (e * abs(math.log(e))) for m, e in zip(means, eps_list)
          if 0 < e <= math.exp(-1.0)]
    fit = max(cs) if cs else float("nan")
    return LogUiReport(eps_list=eps_list, means=means, fit_constant=fit,
                       reps=reps, seed=spec.seed)


def good_event_frequency(spec, reps=200):
    """Frequency of {s_min(S) <= 1/2 and s_max(S) >= 1} over replicas.

    Only meaningful for sums of d >= 2 orthogonal matrices (d' = 0); a
    single orthogonal summand has all singular values equal to 1 and is
    rejected.
    """
    if spec.d < 2:
        raise ValueError("good event needs d >= 2 (all singular values are 1 at d=1)")
    if spec.d_prime != 0:
        raise ValueError("good event is defined for the all-orthogonal sum (d'=0)")
    hits = 0
    for k in range(reps):
        sv = linalg.singular_values(sample_sum(spec, replica=k))
        if sv[-1] <= 0.5 and sv[0] >= 1.0:
            hits += 1
    return hits / reps


@dataclass(frozen=True)
class SingleRingReport:
    """Planar spectrum summary of U T against the analytic radial law."""

    quantile_01: float
    quantile_99: float
    ks_window: float
    window: tuple
    r_grid: np.ndarray
    radial_density: np.ndarray
    inverse_square_moment: float
    moduli: np.ndarray


def _product_log_potential(t_measure_sym, r, eta):
    base_points = [loc for loc, _ in t_measure_sym.atoms if loc > 0]
    g = stieltjes_of_measure(t_measure_sym)
    conv = MirrorEvaluator(free_bernoulli_convolve(
        g, SubordinationParams(rho=max(r, 1e-9))))
    m = invert_to_density(conv, inversion_grid(base_points + [0.0], r), eta=eta)
    return log_moment(m)


def single_ring_demo(t_spec, reps=20, seed=0, window=(0.4, 1.6), r_step=0.02,
                     eta=4e-3):
    """Eigenvalue moduli of U T across replicas vs the analytic radial law.

    The analytic density at radius r is the radial Laplacian of the
    log-potential of the symmetrized diagonal law freely convolved with the
    two-point law at scale r; the comparison statistic is the KS distance
    between conditional radial CDFs on ``window``.  Diagonals whose law is
    a single Dirac are rejected (their product law is not a proper ring).
    """
    if t_spec.is_dirac():
        raise ValueError("diagonal law is a single Dirac; demo needs >= 2 atoms")
    t = t_spec.build_diagonal()
    moduli = []
    for k in range(reps):
        u = _haar_unitary(t_spec.n, derive_rng(seed, k))
        eigs = linalg.general_eigenvalues(u @ t)
        moduli.append(np.abs(eigs))
    moduli = np.sort(np.concatenate(moduli))

    lo, hi = window
    from .measures import symmetrize
    tsym = symmetrize(t_spec.measure())
    r_grid = np.arange(lo, hi + 0.5 * r_step, r_step)
    density, _ = radial_laplacian_profile(
        lambda r: _product_log_potential(tsym, r, eta), r_grid, h=r_step)
    radial = np.clip(2.0 * math.pi * r_grid * density, 0.0, None)

    inside = moduli[(moduli >= lo) & (moduli <= hi)]
    mass = np.trapezoid(radial, r_grid)
    ks = float("nan")
    if len(inside) and mass > 0:
        analytic = SpectralMeasure.from_density(r_grid, radial / mass,
                                                check_mass=False)
        ks = ks_distance(esd_from_reals(inside), analytic)
    return SingleRingReport(
        quantile_01=float(np.quantile(moduli, 0.01)),
        quantile_99=float(np.quantile(moduli, 0.99)),
        ks_window=ks, window=(lo, hi), r_grid=r_grid,
        radial_density=np.asarray(density), moduli=moduli,
        inverse_square_moment=t_spec.inverse_square_moment())
