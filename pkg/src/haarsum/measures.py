"""Spectral measures on the real line and in the plane.

A :class:`SpectralMeasure` is either empirical (sorted points, uniform
weights) or a grid density with an optional list of atoms.  Atoms are kept
as exact (location, mass) pairs, never approximated by spikes on the grid.
Grid quadrature is trapezoidal; grids may be non-uniform, and densities
with inverse-square-root endpoints should be built through
:func:`SpectralMeasure.from_density_fn`, which refines the grid near each
declared edge through the substitution x = edge -/+ t^2 and precomputes the
matching node weights.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg

#: tolerance on total mass at construction (trapezoid including atoms)
MASS_TOL = 1e-3


class AtomAtZeroError(ValueError):
    """Logarithmic moment requested over a window containing a mass at 0."""


@dataclass(frozen=True)
class LogMomentWindow:
    """Truncation window (a, b] for logarithmic moments, 0 <= a < b."""

    a: float = 0.0
    b: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.a < self.b:
            raise ValueError(f"need 0 <= a < b, got a={self.a}, b={self.b}")


def _trapezoid_weights(x):
    w = np.empty_like(x)
    if len(x) == 1:
        w[0] = 0.0
        return w
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    return w


class SpectralMeasure:
    """Probability measure on R: empirical points, or grid density + atoms."""

    def __init__(self, kind, points=None, grid=None, values=None, atoms=(),
                 node_weights=None, check_mass=True):
        self.kind = kind
        self.atoms = tuple((float(loc), float(mass)) for loc, mass in atoms)
        if any(mass < 0 for _, mass in self.atoms):
            raise ValueError("atom masses must be non-negative")
        if kind == "empirical":
            pts = np.sort(np.asarray(points, dtype=float))
            if pts.size == 0:
                raise ValueError("empirical measure needs at least one point")
            if not np.all(np.isfinite(pts)):
                raise ValueError("empirical points must be finite")
            if self.atoms:
                raise ValueError("empirical measures carry no separate atoms")
            self.points = pts
            self.grid = None
            self.values = None
            self.node_weights = None
        elif kind == "density":
            if grid is None or len(grid) == 0:
                self.grid = np.empty(0)
                self.values = np.empty(0)
                self.node_weights = np.empty(0)
            else:
                g = np.asarray(grid, dtype=float)
                f = np.asarray(values, dtype=float)
                if g.shape != f.shape or g.ndim != 1:
                    raise ValueError("grid and values must be matching 1-D arrays")
                if np.any(np.diff(g) <= 0):
                    raise ValueError("grid must be strictly increasing")
                if np.any(f < 0):
                    raise ValueError("density values must be non-negative")
                self.grid = g
                self.values = f
                if node_weights is None:
                    self.node_weights = _trapezoid_weights(g) * f
                else:
                    self.node_weights = np.asarray(node_weights, dtype=float)
            self.points = None
            if check_mass and abs(self.total_mass() - 1.0) > MASS_TOL:
                raise ValueError(
                    f"density + atoms integrate to {self.total_mass():.6f}, "
                    f"expected 1 within {MASS_TOL}"
                )
        else:
            raise ValueError(f"unknown measure kind {kind!r}")
        self.renorm_factor = None

    # ---------------------------------------------------------- constructors

    @classmethod
    def from_points(cls, points):
        return cls("empirical", points=points)

    @classmethod
    def from_atoms(cls, atoms):
        return cls("density", atoms=atoms)

    @classmethod
    def from_density(cls, grid, values, atoms=(), check_mass=True):
        return cls("density", grid=grid, values=values, atoms=atoms,
                   check_mass=check_mass)

    @classmethod
    def from_density_fn(cls, fn, support, sqrt_edges=(), n_mid=1500,
                        n_edge=400, patch_frac=0.08, atoms=(), check_mass=True):
        """Tabulate a density with edge-aware quadrature weights.

        ``sqrt_edges`` lists support endpoints where the density blows up
        like an inverse square root; the grid is quadratically refined
        there and the node weights come from the substitution
        x = edge -/+ t^2, under which the integrand is smooth.
        """
        a, b = float(support[0]), float(support[1])
        if not a < b:
            raise ValueError("empty support interval")
        sqrt_left = any(abs(e - a) < 1e-12 for e in sqrt_edges)
        sqrt_right = any(abs(e - b) < 1e-12 for e in sqrt_edges)
        patch = patch_frac * (b - a)
        pieces = []  # (x nodes, weight factors in x-space)

        if sqrt_left:
            big_t = math.sqrt(patch)
            dt = big_t / n_edge
            t = dt * np.arange(1, n_edge + 1)
            x = a + t * t
            wt = np.full(n_edge, dt)
            wt[0] = 1.5 * dt           # absorbs the t=0 ghost node
            wt[-1] = 0.5 * dt
            pieces.append((x, wt * 2.0 * t))
        mid_lo = a + patch if sqrt_left else a
        mid_hi = b - patch if sqrt_right else b
        xm = np.linspace(mid_lo, mid_hi, n_mid)
        pieces.append((xm, _trapezoid_weights(xm)))
        if sqrt_right:
            big_t = math.sqrt(patch)
            dt = big_t / n_edge
            t = dt * np.arange(n_edge, 0, -1)
            x = b - t * t
            wt = np.full(n_edge, dt)
            wt[0] = 0.5 * dt
            wt[-1] = 1.5 * dt          # absorbs the t=0 ghost node at b
            pieces.append((x, wt * 2.0 * t))

        grid = np.concatenate([p[0] for p in pieces])
        wq = np.concatenate([p[1] for p in pieces])
        order = np.argsort(grid)
        grid = grid[order]
        wq = wq[order]
        keep = np.concatenate([[True], np.diff(grid) > 1e-15])
        # merge duplicated junction nodes, summing their weights
        idx = np.cumsum(keep) - 1
        merged_w = np.zeros(int(idx[-1]) + 1)
        np.add.at(merged_w, idx, wq)
        grid = grid[keep]
        vals = np.asarray(fn(grid), dtype=float)
        vals = np.clip(vals, 0.0, None)
        return cls("density", grid=grid, values=vals, atoms=atoms,
                   node_weights=merged_w * vals, check_mass=check_mass)

    # --------------------------------------------------------------- queries

    def total_mass(self):
        if self.kind == "empirical":
            return 1.0
        return float(np.sum(self.node_weights)) + sum(m for _, m in self.atoms)

    def atom_mass_at(self, loc, tol=0.0):
        return sum(m for x, m in self.atoms if abs(x - loc) <= tol)

    def support_bounds(self):
        lo, hi = math.inf, -math.inf
        if self.kind == "empirical":
            lo, hi = float(self.points[0]), float(self.points[-1])
        elif len(self.grid):
            lo, hi = float(self.grid[0]), float(self.grid[-1])
        for loc, mass in self.atoms:
            if mass > 0:
                lo, hi = min(lo, loc), max(hi, loc)
        return lo, hi

    def quadrature(self):
        """Nodes and weights (x_j, W_j) of the continuous part."""
        if self.kind != "density":
            raise ValueError("quadrature() applies to density measures")
        return self.grid, self.node_weights

    def cdf(self, x, side="right"):
        """Distribution function F(x); ``side='left'`` gives the left limit."""
        x = np.asarray(x, dtype=float)
        if self.kind == "empirical":
            n = len(self.points)
            out = np.searchsorted(self.points, x, side=side) / n
        else:
            out = np.zeros_like(x, dtype=float)
            if len(self.grid) > 1:
                cell = (self.grid[1:] - self.grid[:-1]) * 0.5 \
                    * (self.values[1:] + self.values[:-1])
                cum = np.concatenate([[0.0], np.cumsum(cell)])
                # match the edge-aware node-weight mass (no-op on plain grids)
                wsum = float(np.sum(self.node_weights))
                if cum[-1] > 0.0 and wsum > 0.0:
                    cum *= wsum / cum[-1]
                out = np.interp(x, self.grid, cum, left=0.0, right=cum[-1])
            for loc, mass in self.atoms:
                if side == "right":
                    out = out + mass * (x >= loc)
                else:
                    out = out + mass * (x > loc)
        return out if out.ndim else float(out)

    # ---------------------------------------------------------------- export

    def to_csv(self, path, column="density", header_lines=()):
        """Write (x, density) or (x, cdf) rows; atoms go to a JSON sidecar."""
        if column not in ("density", "cdf"):
            raise ValueError("column must be 'density' or 'cdf'")
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"x,{column}\n")
            if self.kind == "empirical":
                if column == "density":
                    raise ValueError("empirical measures export cdf, not density")
                xs = self.points
                ys = self.cdf(xs)
            else:
                xs = self.grid
                ys = self.cdf(xs) if column == "cdf" else self.values
            for x, y in zip(xs, ys):
                fh.write(f"{float(x)!r},{float(y)!r}\n")

    def atoms_to_json(self):
        return json.dumps([{"location": loc, "mass": mass} for loc, mass in self.atoms])


def esd_from_reals(points):
    """Empirical spectral distribution of a list of real eigenvalues."""
    return SpectralMeasure.from_points(points)


def symmetrize(m):
    """Even part under negation: mu~(B) = (mu(B) + mu(-B)) / 2.

    For a measure supported on R+ this is the usual symmetrized law with
    density f(|x|)/2; already-symmetric measures are fixed points.
    """
    if m.kind == "empirical":
        return SpectralMeasure.from_points(np.concatenate([m.points, -m.points]))
    atoms = {}
    for loc, mass in m.atoms:
        if loc == 0.0:
            atoms[0.0] = atoms.get(0.0, 0.0) + mass
        else:
            atoms[loc] = atoms.get(loc, 0.0) + 0.5 * mass
            atoms[-loc] = atoms.get(-loc, 0.0) + 0.5 * mass
    atom_list = sorted(atoms.items())
    if len(m.grid) == 0:
        return SpectralMeasure.from_atoms(atom_list)
    if m.grid[0] >= 0.0:
        # exact mirroring, preserving edge-aware weights
        drop0 = 1 if m.grid[0] == 0.0 else 0
        grid = np.concatenate([-m.grid[::-1], m.grid[drop0:]])
        vals = 0.5 * np.concatenate([m.values[::-1], m.values[drop0:]])
        w = 0.5 * np.concatenate([m.node_weights[::-1], m.node_weights[drop0:]])
        if drop0:
            w[len(m.grid) - 1] *= 2.0
        if m.grid[0] > 1e-9:
            # zero sentinels so interpolation across the central gap
            # does not invent density where there is none
            gap = m.grid[0] * (1.0 - 1e-9)
            grid = np.concatenate([grid[:len(m.grid)], [-gap, gap],
                                   grid[len(m.grid):]])
            vals = np.concatenate([vals[:len(m.grid)], [0.0, 0.0],
                                   vals[len(m.grid):]])
            w = np.concatenate([w[:len(m.grid)], [0.0, 0.0], w[len(m.grid):]])
        return SpectralMeasure("density", grid=grid, values=vals,
                               atoms=atom_list, node_weights=w)
    grid = np.union1d(m.grid, -m.grid)
    fwd = np.interp(grid, m.grid, m.values, left=0.0, right=0.0)
    bwd = np.interp(-grid, m.grid, m.values, left=0.0, right=0.0)
    vals = 0.5 * (fwd + bwd)
    return SpectralMeasure("density", grid=grid, values=vals, atoms=atom_list)


def ks_distance(a, b):
    """Kolmogorov-Smirnov distance: sup |F_a - F_b| over the merged grid."""
    candidates = []
    for m in (a, b):
        if m.kind == "empirical":
            candidates.append(m.points)
        elif len(m.grid):
            candidates.append(m.grid)
        if m.atoms:
            candidates.append(np.array([loc for loc, _ in m.atoms]))
    x = np.unique(np.concatenate(candidates))
    right = np.abs(a.cdf(x, side="right") - b.cdf(x, side="right"))
    left = np.abs(a.cdf(x, side="left") - b.cdf(x, side="left"))
    return float(max(np.max(right), np.max(left)))


def _log_integral_halfline(grid, values, lo, hi):
    """integral of f(x) log(x) over [lo, hi] for a density tabulated on x >= 0.

    Exact for the piecewise-linear interpolant: each cell uses the closed
    forms of int log x dx and int x log x dx, which stay finite down to 0.
    """
    if len(grid) < 2:
        return 0.0
    lo = max(lo, grid[0])
    hi = min(hi, grid[-1])
    if lo >= hi:
        return 0.0
    x0, x1 = grid[:-1], grid[1:]
    f0, f1 = values[:-1], values[1:]
    u0 = np.clip(lo, x0, x1)
    u1 = np.clip(hi, x0, x1)
    mask = u1 > u0
    if not np.any(mask):
        return 0.0
    x0, x1, f0, f1 = x0[mask], x1[mask], f0[mask], f1[mask]
    u0, u1 = u0[mask], u1[mask]
    c1 = (f1 - f0) / (x1 - x0)
    c0 = f0 - c1 * x0

    def p0(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] * (np.log(x[pos]) - 1.0)
        return out

    def p1(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = 0.5 * x[pos] ** 2 * np.log(x[pos]) - 0.25 * x[pos] ** 2
        return out

    return float(np.sum(c0 * (p0(u1) - p0(u0)) + c1 * (p1(u1) - p1(u0))))


def log_moment(m, window=LogMomentWindow()):
    """Truncated logarithmic moment: integral of log|x| over a < |x| <= b.

    Empirical measures are summed exactly over their points; grid densities
    use cellwise linear-interpolant integration against log|x|, which keeps
    the integrable singularity at 0 under control.  A point mass at 0 inside
    the window makes the moment -infinity and raises
    :class:`AtomAtZeroError` rather than returning a silent number.
    """
    a, b = window.a, window.b
    if m.kind == "empirical":
        absx = np.abs(m.points)
        if a == 0.0 and np.any(absx == 0.0):
            raise AtomAtZeroError("empirical measure has mass at 0; log moment diverges")
        sel = (absx > a) & (absx <= b)
        return float(np.sum(np.log(absx[sel])) / len(m.points))
    total = 0.0
    for loc, mass in m.atoms:
        if mass == 0.0:
            continue
        if loc == 0.0:
            if a == 0.0:
                raise AtomAtZeroError("atom at 0 inside the window; log moment diverges")
            continue
        if a < abs(loc) <= b:
            total += mass * math.log(abs(loc))
    if len(m.grid) >= 2:
        grid, values = m.grid, m.values
        if grid[0] < 0.0 < grid[-1] and not np.any(grid == 0.0):
            # split the cell straddling 0 so both half-lines are covered
            f0 = float(np.interp(0.0, grid, values))
            k = int(np.searchsorted(grid, 0.0))
            grid = np.insert(grid, k, 0.0)
            values = np.insert(values, k, f0)
        pos_sel = grid >= 0.0
        if np.any(pos_sel):
            total += _log_integral_halfline(grid[pos_sel], values[pos_sel], a, b)
        neg_sel = grid <= 0.0
        if np.any(neg_sel):
            total += _log_integral_halfline(-grid[neg_sel][::-1],
                                            values[neg_sel][::-1], a, b)
    return total


@dataclass(frozen=True)
class PlanarSpectrum:
    """Finite multiset of complex eigenvalues of an n x n matrix."""

    points: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=np.complex128))
        if len(self.points) != self.n:
            raise ValueError(
                f"eigenvalue count {len(self.points)} does not match dimension {self.n}"
            )

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m)
        return cls(points=linalg.general_eigenvalues(m), n=m.shape[0])

    def moduli(self):
        return np.abs(self.points)
