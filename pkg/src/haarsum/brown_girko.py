"""Log-potentials, radial Brown-measure reconstruction, planar/log identity.

The planar eigenvalue law of the matrix sum is recovered in two moves: the
log-potential of the analytic singular law at shift radius r, then the
radial Laplacian f''(r) + f'(r)/r scaled by 1/(2 pi).  The exact finite-n
identity check integrates a smooth bump's Laplacian against the matrix
log-potential and compares with the bump averaged over the actual complex
eigenvalues, which must agree up to pure quadrature error.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .measures import log_moment
from .schwinger_dyson import (
    MirrorEvaluator,
    invert_to_density,
    theta_recursion,
)

#: keep-out margin around the exceptional radii {0, 1, ..., d}
EXCEPTIONAL_MARGIN = 0.05

#: inversion depth for potentials; the base grid below must resolve
#: features of width eta, and the smooth part of the smearing bias cancels
#: in the radial differencing, so this does not limit accuracy
POTENTIAL_ETA = 4e-3

_GRID_BASE = 2e-3
_GRID_FINE = 4e-4
_GRID_BAND = 0.12


@dataclass(frozen=True)
class RadialProfile:
    """Radially symmetric profile sampled on an increasing r-grid.

    ``values`` holds the reconstructed planar density; when produced by
    :func:`brown_from_potential` the underlying log-potential samples ride
    along in ``potential``.
    """

    r_grid: np.ndarray
    values: np.ndarray
    potential: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "r_grid", np.asarray(self.r_grid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.r_grid) < 5:
            raise ValueError("radial profile needs at least 5 grid points")
        if np.any(np.diff(self.r_grid) <= 0):
            raise ValueError("radial grid must be strictly increasing")
        if not (np.all(np.isfinite(self.r_grid)) and np.all(np.isfinite(self.values))):
            raise ValueError("radial profile entries must be finite")


@dataclass(frozen=True)
class BumpSpec:
    """Smooth compactly supported test function: center and support radius."""

    center: complex = 0.0
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")


def bump_value(spec, v):
    """exp(1 - 1/(1-t^2)) with t = |v - center| / radius, zero for t >= 1."""
    t2 = (np.abs(np.asarray(v, dtype=complex) - spec.center) / spec.radius) ** 2
    out = np.zeros(t2.shape)
    inside = t2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t2[inside]))
    return out if out.ndim else float(out)


def bump_laplacian(spec, v):
    """Closed-form planar Laplacian of :func:`bump_value`.

    For a radial profile phi(t), the Laplacian in v is
    (phi''(t) + phi'(t)/t) / radius^2; both derivatives of the standard
    bump are smooth multiples of the bump itself.
    """
    t2 = (np.abs(np.asarray(v, dtype=complex) - spec.center) / spec.radius) ** 2
    out = np.zeros(t2.shape)
    inside = t2 < 1.0
    u = 1.0 - t2[inside]
    phi = np.exp(1.0 - 1.0 / u)
    out[inside] = phi * (-4.0 / u ** 2 - 8.0 * t2[inside] / u ** 3
                         + 4.0 * t2[inside] / u ** 4) / spec.radius ** 2
    return out if out.ndim else float(out)


def exceptional_distance(d, r):
    """Distance from r to the exceptional radius set {0, 1, ..., d}."""
    return min(abs(r - m) for m in range(d + 1))


def inversion_grid(base_points, r, pad=0.3):
    """Symmetric inversion grid for a law built from ``base_points`` at
    shift radius r: dense on the support, finer in bands around the
    candidate singular abscissae +/-|b +/- r|."""
    base_points = sorted(set(float(b) for b in base_points))
    hi = base_points[-1] + r + pad
    lo = max(0.0, r - base_points[-1] - pad)
    xs = [np.arange(lo, hi, _GRID_BASE)]
    for b in base_points:
        for c in (abs(b - r), b + r):
            a, bb = max(c - _GRID_BAND, lo), min(c + _GRID_BAND, hi)
            if bb > a:
                xs.append(np.arange(a, bb, _GRID_FINE))
    if lo > 0.0:
        # coarse bridge over the central hole so the far tail of the
        # smeared law is still represented
        xs.append(np.linspace(0.0, lo, 200))
    pos = np.unique(np.concatenate(xs + [np.array([hi])]))
    return np.concatenate([-pos[::-1], pos[1:]])


def _potential_grid(d, r):
    return inversion_grid(range(d + 1), r)


def log_potential(d, r, params=None, eta=POTENTIAL_ETA):
    """Logarithmic potential of the d-summand singular law at radius r.

    Integrates log|x| against the density recovered by Stieltjes inversion
    of the d-summand evaluator at shift r (the direction of the shift is
    irrelevant; the law depends on |v| only).  Radii within
    ``EXCEPTIONAL_MARGIN`` of {0, 1, ..., d} are rejected: the potential is
    only controlled away from that set.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    if r < 0:
        raise ValueError("radius must be non-negative")
    if exceptional_distance(d, r) < EXCEPTIONAL_MARGIN:
        raise ValueError(
            f"radius {r:.4f} is within {EXCEPTIONAL_MARGIN} of an exceptional "
            f"radius in {{0..{d}}}; the log-potential is not controlled there")
    g = MirrorEvaluator(theta_recursion(d, r, params=params))
    m = invert_to_density(g, _potential_grid(d, r), eta=eta)
    return log_moment(m)


def radial_laplacian_profile(potential_fn, r_grid, h):
    """(1/2pi)(f'' + f'/r) by 5-point central stencils, deduplicating
    stencil radii shared between neighbouring grid points."""
    r_grid = np.asarray(r_grid, dtype=float)
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    wanted = (r_grid[:, None] + offsets[None, :]).ravel()
    order = np.argsort(wanted)
    uniq = [wanted[order[0]]]
    for x in wanted[order[1:]]:
        if x - uniq[-1] > 1e-12:
            uniq.append(x)
    uniq = np.asarray(uniq)
    values = np.array([potential_fn(x) for x in uniq])
    idx = np.searchsorted(uniq, wanted - 1e-13).reshape(len(r_grid), 5)
    f = values[idx]
    fp = (f[:, 0] - 8.0 * f[:, 1] + 8.0 * f[:, 3] - f[:, 4]) / (12.0 * h)
    fpp = (-f[:, 0] + 16.0 * f[:, 1] - 30.0 * f[:, 2]
           + 16.0 * f[:, 3] - f[:, 4]) / (12.0 * h * h)
    density = (fpp + fp / r_grid) / (2.0 * math.pi)
    return density, f[:, 2]


def brown_from_potential(d, r_grid, h_step=None, params=None):
    """Reconstruct the planar radial density from log-potentials.

    The density at radius r is (1/2pi)(f''(r) + f'(r)/r) with f the
    log-potential, differentiated by 5-point central stencils of step
    ``h_step`` (default 0.02 sqrt(d)).  Every radius and stencil point must
    stay clear of the exceptional set {0, 1, ..., d}.
    """
    if d < 2:
        raise ValueError("planar reconstruction needs d >= 2")
    r_grid = np.asarray(r_grid, dtype=float)
    if len(r_grid) == 0:
        raise ValueError("empty radial grid")
    h = 0.02 * math.sqrt(d) if h_step is None else float(h_step)
    if h <= 0:
        raise ValueError("h_step must be positive")
    sqrt_d = math.sqrt(d)
    for r in r_grid:
        if not 0.0 < r < sqrt_d:
            raise ValueError(f"radius {r:.4f} outside (0, sqrt({d}))")
        if exceptional_distance(d, r) < EXCEPTIONAL_MARGIN + 2.0 * h:
            raise ValueError(
                f"radius {r:.4f} too close to an exceptional radius; "
                f"stencil points need {EXCEPTIONAL_MARGIN} clearance")
    density, potential = radial_laplacian_profile(
        lambda r: log_potential(d, r, params=params), r_grid, h)
    return RadialProfile(r_grid=r_grid, values=density, potential=potential)


@dataclass(frozen=True)
class GirkoReport:
    """Both sides of the finite-n planar/log identity and their gap."""

    lhs: float
    rhs: float
    gap: float
    quad_n: int


def girko_identity_check(s, psi, quad_n=120):
    """Check the exact identity between eigenvalue averages and potentials.

    lhs averages the bump over the complex eigenvalues of ``s``; rhs
    integrates (1/2pi) Laplacian(bump) times the matrix log-potential
    (1/n) sum_k log s_k(s - vI) over the bump's support square by the
    midpoint rule.  The identity is exact in the continuum, so the gap is
    pure quadrature error and shrinks under grid refinement.
    """
    s = np.asarray(s, dtype=complex)
    n = s.shape[0]
    eigs = linalg.general_eigenvalues(s)
    lhs = float(np.mean(bump_value(psi, eigs)))

    half = psi.radius
    cell = 2.0 * half / quad_n
    centers = -half + cell * (np.arange(quad_n) + 0.5)
    rhs = 0.0
    eye = np.eye(n)
    for x in centers:
        vs = psi.center + x + 1j * centers
        lap = bump_laplacian(psi, vs)
        for v, l in zip(vs, lap):
            if l == 0.0:
                continue
            sv = linalg.singular_values(s - v * eye)
            logpot = float(np.sum(np.log(np.clip(sv, 1e-300, None)))) / n
            rhs += l * logpot
    rhs *= cell * cell / (2.0 * math.pi)
    return GirkoReport(lhs=lhs, rhs=float(rhs), gap=abs(lhs - float(rhs)), quad_n=quad_n)


def radial_symmetry_check(d, r, k_directions=8, params=None, n_grid=1200):
    """Max sup-distance between inverted densities across shift directions.

    The analytic law depends on the shift only through its modulus; this
    re-derives the density at ``k_directions`` arguments of equal modulus
    and reports the worst pointwise discrepancy.
    """
    if k_directions < 4:
        raise ValueError("need at least 4 directions")
    span = d + r + 0.3
    grid = np.linspace(-span, span, n_grid)
    base = None
    worst = 0.0
    for j in range(k_directions):
        v = r * np.exp(2j * math.pi * j / k_directions)
        m = invert_to_density(theta_recursion(d, v, params=params), grid,
                              eta=POTENTIAL_ETA)
        if base is None:
            base = m.values
        else:
            worst = max(worst, float(np.max(np.abs(m.values - base))))
    return worst
