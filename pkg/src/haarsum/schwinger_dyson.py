"""Stieltjes evaluators and the free-convolution fixed-point engine.

The central operation convolves a symmetric law with the two-point law
(delta_rho + delta_{-rho})/2 by solving the self-consistency relation

    G(z) = G_prev(psi(z)),   psi(z) = z - 2 rho^2 G(z) / (1 + sqrt(1 + 4 rho^2 G(z)^2)),

per queried z with damped Picard iteration on the subordination point
psi (a parametrization with no square root, hence no branch hazard; the
branch implied by the solution is verified a posteriori).  Uniqueness is
only guaranteed high in the upper half-plane, so each query is continued
from Im z = 10 down a geometric eta schedule, warm-starting every level.
Iterating the convolution against the closed-form base transform realizes
the d-summand recursion.
"""

import math
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from .closed_forms import stieltjes_G1
from .measures import SpectralMeasure

DEFAULT_ETA_START = 10.0
DEFAULT_ETA_FACTOR = 0.7
DEFAULT_ETA_FLOOR = 1e-3

#: allowed leak of Im G above zero for a valid Stieltjes evaluator
IM_LEAK_TOL = 1e-9


class FixedPointError(RuntimeError):
    """Picard iteration failed to converge; carries the worst (z, residual)."""

    def __init__(self, message, z=None, residual=None):
        super().__init__(message)
        self.z = z
        self.residual = residual


def default_eta_schedule(start=DEFAULT_ETA_START, factor=DEFAULT_ETA_FACTOR,
                         floor=DEFAULT_ETA_FLOOR):
    """Strictly decreasing geometric ladder of imaginary offsets."""
    out = []
    eta = start
    while eta > floor:
        out.append(eta)
        eta *= factor
    out.append(floor)
    return tuple(out)


@dataclass(frozen=True)
class SubordinationParams:
    """Knobs of the fixed-point solver.

    ``eta_schedule`` is extended below its floor by its own tail ratio
    whenever a query sits deeper than the floor.
    """

    rho: float = 1.0
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500
    eta_schedule: tuple = field(default_factory=default_eta_schedule)

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")
        sched = tuple(float(e) for e in self.eta_schedule)
        if len(sched) < 1 or np.any(np.diff(sched) >= 0):
            raise ValueError("eta schedule must be strictly decreasing")
        object.__setattr__(self, "eta_schedule", sched)

    def schedule_down_to(self, target):
        """Schedule entries above ``target``, extended geometrically if needed."""
        sched = [e for e in self.eta_schedule if e > target]
        if len(self.eta_schedule) >= 2:
            ratio = self.eta_schedule[-1] / self.eta_schedule[-2]
        else:
            ratio = DEFAULT_ETA_FACTOR
        eta = sched[-1] * ratio if sched else self.eta_schedule[-1]
        while eta > target:
            sched.append(eta)
            eta *= ratio
        return sched


class StieltjesEvaluator:
    """Callable z in C+ -> C- with ~1/z decay; vectorized over arrays."""

    def __init__(self, label):
        self.label = label
        self.last_residuals = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zf = np.atleast_1d(z)
        if np.any(zf.imag <= 0.0):
            raise ValueError(f"{self.label}: arguments must lie in the open upper half-plane")
        out = self._eval(zf)
        if np.max(out.imag) > IM_LEAK_TOL:
            raise FixedPointError(
                f"{self.label}: Im G leaked above {IM_LEAK_TOL:g}",
                z=zf[int(np.argmax(out.imag))], residual=float(np.max(out.imag)))
        return complex(out[0]) if scalar else out.reshape(z.shape)

    def _eval(self, z):
        raise NotImplementedError


class ClosedFormEvaluator(StieltjesEvaluator):
    def __init__(self, fn, label):
        super().__init__(label)
        self._fn = fn

    def _eval(self, z):
        out = np.atleast_1d(np.asarray(self._fn(z), dtype=complex))
        self.last_residuals = np.zeros(out.shape)
        return out


class MeasureEvaluator(StieltjesEvaluator):
    """Quadrature Stieltjes transform of a tabulated or empirical measure."""

    def __init__(self, measure, label=None):
        super().__init__(label or f"stieltjes[{measure.kind}]")
        if measure.kind == "empirical":
            self._nodes = measure.points.astype(float)
            self._weights = np.full(len(self._nodes), 1.0 / len(self._nodes))
            self._atoms = ()
        else:
            self._nodes, self._weights = measure.quadrature()
            self._atoms = measure.atoms

    def _eval(self, z):
        out = np.zeros(z.shape, dtype=complex)
        block = max(1, int(2_000_000 // max(1, len(self._nodes))))
        for k in range(0, len(z), block):
            zz = z[k:k + block, None]
            out[k:k + block] = np.sum(self._weights / (zz - self._nodes), axis=1)
        for loc, mass in self._atoms:
            out += mass / (z - loc)
        self.last_residuals = np.zeros(out.shape)
        return out


def stieltjes_of_measure(m, label=None):
    """Stieltjes evaluator of a :class:`SpectralMeasure`; atoms enter exactly."""
    return MeasureEvaluator(m, label=label)


def theta1_evaluator(v):
    """Closed-form base evaluator of the symmetrized shifted-unitary law."""
    return ClosedFormEvaluator(lambda z: stieltjes_G1(v, z),
                               label=f"theta(1, r={abs(v):g})")


class BernoulliConvolution(StieltjesEvaluator):
    """Free convolution of a symmetric law with (delta_rho + delta_-rho)/2.

    Each query solves the subordination fixed point by eta continuation;
    repeated queries with slowly moving arguments (as arise when this
    evaluator feeds another convolution) warm-start from the previous
    solution and fall back to full continuation if that fails to verify.
    """

    def __init__(self, prev, params):
        super().__init__(f"({prev.label}) boxplus bernoulli({params.rho:g})")
        self.prev = prev
        self.params = params
        self._warm = threading.local()

    # ------------------------------------------------------------ internals
    #
    # The fixed point is solved in the subordination variable w through
    #
    #     w  <-  z - rho^2 / (z + 1/G_prev(w) - w),
    #
    # algebraically equivalent to the square-root form
    # psi(z) = z - 2 rho^2 G / (1 + sqrt(1 + 4 rho^2 G^2)) but with the
    # root eliminated: near points where 1 + 4 rho^2 G^2 vanishes the
    # square-root map is not Lipschitz and no damping makes a G-iteration
    # converge, whereas the map above is a half-plane contraction.  The
    # transform value is G(z) = G_prev(w*); the square-root branch implied
    # by the solution is recovered afterwards and checked for consistency,
    # which pins the branch "determined by analyticity" a posteriori.

    def _step(self, z, w):
        g = self.prev(w)
        den = z + 1.0 / g - w
        bad = den.imag <= 0.0
        if np.any(bad):
            # Im(z + 1/G_prev - w) > 0 exactly; guard the float boundary
            den = np.where(bad, den.real + 1e-12j, den)
        return z - self.params.rho ** 2 / den, g

    def _picard(self, z, w, damping=None):
        # evaluates prev on the full array every iteration: converged points
        # are fixed points of the update, and a shape-stable argument keeps
        # the inner evaluator's warm start effective when this convolution
        # feeds another one.  Damped Picard steps are switched pointwise to
        # secant steps on the residual R(w) = step(w) - w once two iterates
        # exist: near spectral edges the contraction rate of plain Picard
        # degrades like 1 - c sqrt(Im z) while secant stays superlinear.
        p = self.params
        if damping is None:
            damping = p.damping
        resid = np.full(z.shape, np.inf)
        g_prev_iter = None
        w_prev = r_prev = None
        floor = 0.45 * z.imag
        for it in range(p.max_iter):
            wn, g = self._step(z, w)
            r = wn - w
            if g_prev_iter is not None:
                resid = np.maximum(np.abs(r), np.abs(g - g_prev_iter))
                if np.max(resid) <= p.tol:
                    return w, g, resid, damping
            g_prev_iter = g
            cand = (1.0 - damping) * w + damping * wn
            if w_prev is not None:
                denom = r - r_prev
                with np.errstate(divide="ignore", invalid="ignore"):
                    sec = w - r * (w - w_prev) / denom
                ok = (np.abs(denom) > 1e-300) & np.isfinite(sec) \
                    & (sec.imag > floor)
                cand = np.where(ok, sec, cand)
            w_prev, r_prev = w, r
            w = cand
        return w, g, resid, damping

    def _solve_full(self, z):
        p = self.params
        target = float(np.min(z.imag))
        levels = p.schedule_down_to(target)
        zk = z.real + 1j * np.maximum(z.imag, levels[0]) if levels else z
        w = zk.astype(complex)
        damping = p.damping
        for eta in levels:
            zk = z.real + 1j * np.maximum(z.imag, eta)
            w, g, resid, damping = self._picard(zk, w, damping)
        w, g, resid, damping = self._picard(z.copy(), w, damping)
        return w, g, resid, damping

    def _verify(self, z, w, g, resid):
        p = self.params
        if np.any(resid > p.tol):
            return False
        if np.max(g.imag) > IM_LEAK_TOL:
            return False
        if not np.all(w.imag >= 0.45 * z.imag):
            return False
        # branch consistency: s := 2 rho^2 G/(z-w) - 1 must be the square
        # root appearing in the subordination relation
        gap = z - w
        safe = np.abs(gap) > 1e-8
        if np.any(safe):
            s = 2.0 * p.rho ** 2 * g[safe] / gap[safe] - 1.0
            lhs = s * s
            rhs = 1.0 + 4.0 * p.rho ** 2 * g[safe] * g[safe]
            if not np.all(np.abs(lhs - rhs) <= 1e-6 * (1.0 + np.abs(rhs))):
                return False
        return True

    def _eval(self, z):
        p = self.params
        warm = getattr(self._warm, "state", None)
        g = None
        if warm is not None and warm[0].shape == z.shape \
                and np.max(np.abs(warm[0] - z)) < 1.0:
            w, g, resid, damping = self._picard(z.copy(), warm[1].copy(), warm[3])
            if not self._verify(z, w, g, resid):
                g = None
        if g is None:
            w, g, resid, damping = self._solve_full(z)
            if np.any(resid > p.tol):
                worst = int(np.argmax(resid))
                raise FixedPointError(
                    f"{self.label}: no convergence after continuation at "
                    f"z={z[worst]:.6g} (residual {resid[worst]:.3e})",
                    z=complex(z[worst]), residual=float(resid[worst]))
            if not self._verify(z, w, g, resid):
                raise FixedPointError(
                    f"{self.label}: converged point failed verification",
                    z=complex(z[int(np.argmax(resid))]), residual=float(np.max(resid)))
        self._warm.state = (z.copy(), w.copy(), g.copy(), damping)
        self.last_residuals = resid
        return g


class MirrorEvaluator(StieltjesEvaluator):
    """Exploits G(-conj z) = -conj G(z), valid for laws even under negation.

    Queries are folded onto Re z >= 0 and deduplicated before reaching the
    wrapped evaluator, which halves the work on symmetric grids.
    """

    def __init__(self, inner):
        super().__init__(f"mirror[{inner.label}]")
        self.inner = inner

    def _eval(self, z):
        folded = np.where(z.real < 0.0, -np.conj(z), z)
        uniq, inverse = np.unique(folded, return_inverse=True)
        vals = np.atleast_1d(np.asarray(self.inner(uniq), dtype=complex))[inverse]
        resid = self.inner.last_residuals
        if resid is not None and len(resid) == len(uniq):
            self.last_residuals = resid[inverse]
        return np.where(z.real < 0.0, -np.conj(vals), vals)


def free_bernoulli_convolve(g, params=None):
    """Evaluator of the free convolution of ``g``'s law with lambda_rho."""
    if params is None:
        params = SubordinationParams()
    return BernoulliConvolution(g, params)


def theta_recursion(d, v, params=None):
    """Evaluator of the d-summand limiting law at shift v.

    d = 1 is the closed-form base case; each further summand is one free
    Bernoulli convolution at unit scale.
    """
    if d < 1 or int(d) != d:
        raise ValueError("summand count d must be a positive integer")
    if params is None:
        params = SubordinationParams()
    g = theta1_evaluator(v)
    for _ in range(int(d) - 1):
        g = free_bernoulli_convolve(g, replace(params, rho=1.0))
    return g


def invert_to_density(g, grid, eta=DEFAULT_ETA_FLOOR, strict=False):
    """Recover a density from an evaluator by boundary values at eta, eta/2.

    density(x) = -(1/pi) Im g(x + i eta), Richardson-extrapolated across the
    two levels to cancel the O(eta) smearing, clipped at zero and
    renormalized.  The renormalization factor is reported on the returned
    measure; factors outside [0.98, 1.02] raise in strict mode.
    """
    grid = np.asarray(grid, dtype=float)
    if eta <= 0:
        raise ValueError("eta must be positive")
    d_full = -np.imag(g(grid + 1j * eta)) / np.pi
    d_half = -np.imag(g(grid + 0.5j * eta)) / np.pi
    dens = np.clip(2.0 * d_half - d_full, 0.0, None)
    mass = float(np.trapezoid(dens, grid))
    if mass <= 0:
        raise FixedPointError("inversion produced zero mass on the grid")
    factor = 1.0 / mass
    if not 0.98 <= factor <= 1.02:
        message = (f"inversion renormalization factor {factor:.4f} outside "
                   f"[0.98, 1.02]; grid or eta likely inadequate")
        if strict:
            raise FixedPointError(message)
        import warnings
        warnings.warn(message, stacklevel=2)
    m = SpectralMeasure.from_density(grid, dens * factor, check_mass=False)
    m.renorm_factor = factor
    return m


@dataclass(frozen=True)
class ImRegionReport:
    """Where |Im G| is large relative to the excluded balls around +/-m +/- r."""

    gamma: float
    centers: tuple
    max_inside: float
    max_outside: float
    argmax_outside: complex
    eta_rows: tuple
    max_per_eta: tuple


def im_region_probe(g, d, v, gamma=0.3, x_step=0.02, eta_rows=(1e-3, 3e-3, 1e-2, 0.1)):
    """Map |Im G| on a grid and split it by the excluded balls.

    The singular set of the d-summand law at shift v lies inside balls of
    radius gamma around the points +/-m +/- |v|, m = 0..d; outside those
    balls |Im G| should stay bounded.  Diagnostic only; never raises on
    large values.
    """
    r = abs(v)
    centers = sorted({s1 * m + s2 * r for m in range(d + 1)
                      for s1 in (-1.0, 1.0) for s2 in (-1.0, 1.0)})
    span = d + r + 1.0
    xs = np.arange(-span, span + x_step, x_step)
    max_inside = 0.0
    max_outside = 0.0
    argmax_outside = complex(xs[0], eta_rows[0])
    max_per_eta = []
    for eta in eta_rows:
        z = xs + 1j * eta
        vals = np.abs(np.imag(g(z)))
        max_per_eta.append(float(np.max(vals)))
        dist = np.min(np.abs(xs[:, None] - np.asarray(centers)[None, :]), axis=1)
        inside = dist < gamma
        if np.any(inside):
            max_inside = max(max_inside, float(np.max(vals[inside])))
        if np.any(~inside):
            k = int(np.argmax(np.where(~inside, vals, -np.inf)))
            if vals[k] > max_outside:
                max_outside = float(vals[k])
                argmax_outside = complex(xs[k], eta)
    return ImRegionReport(
        gamma=gamma, centers=tuple(centers), max_inside=max_inside,
        max_outside=max_outside, argmax_outside=argmax_outside,
        eta_rows=tuple(eta_rows), max_per_eta=tuple(max_per_eta))
