"""Closed-form densities and transforms for the limiting spectral laws.

Contents: the singular-value density f_r of a Haar unitary shifted by r
(and its squared-variable form g_r), the planar Brown density h_d of the
d-fold free sum with its radial CDF, the limiting singular-value density
of the full sum at zero shift, the closed-form base Stieltjes transform of
the symmetrized shifted-unitary law, and the arcsine moment sequence.

All densities vanish outside their supports and normalize to one under the
edge-aware quadrature used by :mod:`haarsum.measures`.
"""

import math

import numpy as np

from .measures import SpectralMeasure, symmetrize


class AtomicCaseError(ValueError):
    """Parameter choice makes the law purely atomic; no density exists."""


def density_f_r(r, x):
    """Singular-value density of a Haar unitary minus r times the identity.

    f_r(x) = (2/pi) x / sqrt((x^2 - (r-1)^2) ((r+1)^2 - x^2)) on
    [|r-1|, r+1]; zero outside.  For r = 0 all singular values equal 1
    (a single atom) and :class:`AtomicCaseError` is raised.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0.0:
        raise AtomicCaseError("r=0 law is a single atom at x=1; no density")
    x = np.asarray(x, dtype=float)
    a, b = abs(r - 1.0), r + 1.0
    inside = (x > a) & (x < b)
    out = np.zeros_like(x)
    xi = x[inside]
    rad = (xi * xi - a * a) * (b * b - xi * xi)
    out[inside] = (2.0 / np.pi) * xi / np.sqrt(rad)
    return out if out.ndim else float(out)


def density_g_r(r, x):
    """Density of the squared singular values, g_r(x) = f_r(sqrt x)/(2 sqrt x).

    g_r(x) = (1/pi) / sqrt((x - (r-1)^2) ((r+1)^2 - x)) on
    [(r-1)^2, (r+1)^2].
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0.0:
        raise AtomicCaseError("r=0 law is a single atom at x=1; no density")
    x = np.asarray(x, dtype=float)
    a2, b2 = (r - 1.0) ** 2, (r + 1.0) ** 2
    inside = (x > a2) & (x < b2)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = 1.0 / (np.pi * np.sqrt((xi - a2) * (b2 - xi)))
    return out if out.ndim else float(out)


def brown_density_h_d(d, v):
    """Planar density of the limiting eigenvalue law of the d-fold sum.

    h_d(v) = (1/pi) d^2 (d-1) / (d^2 - |v|^2)^2 for |v| <= sqrt(d), zero
    outside.  Defined for d >= 2; the d = 1 law is uniform on the unit
    circle (see :func:`unit_circle_radial_cdf`) and has no planar density.
    """
    if d < 2:
        raise ValueError("planar density needs d >= 2; d=1 is uniform on the unit circle")
    v = np.asarray(v, dtype=complex)
    r2 = np.abs(v) ** 2
    out = np.zeros(v.shape, dtype=float)
    inside = r2 <= d
    out[inside] = (d * d * (d - 1.0) / np.pi) / (d * d - r2[inside]) ** 2
    return out if out.ndim else float(out)


def radial_cdf_F_d(d, r):
    """Radial CDF of the planar law: F_d(r) = (d-1) r^2 / (d^2 - r^2), r <= sqrt d."""
    if d < 2:
        raise ValueError("radial CDF needs d >= 2; d=1 is uniform on the unit circle")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    rc = np.minimum(r, math.sqrt(d))
    out = (d - 1.0) * rc * rc / (d * d - rc * rc)
    return out if out.ndim else float(out)


def unit_circle_radial_cdf(r):
    """Radial CDF of the d = 1 planar law: uniform on the unit circle."""
    r = np.asarray(r, dtype=float)
    out = (r >= 1.0).astype(float)
    return out if out.ndim else float(out)


def density_abs_sd(d, x):
    """Limiting singular-value density of the zero-shift sum of d summands.

    d sqrt(4(d-1) - x^2) / (pi (d^2 - x^2)) on [0, 2 sqrt(d-1)].
    """
    if d < 2:
        raise ValueError("the d=1 singular law is a single atom at 1")
    x = np.asarray(x, dtype=float)
    b = 2.0 * math.sqrt(d - 1.0)
    inside = (x >= 0.0) & (x < b)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = d * np.sqrt(4.0 * (d - 1.0) - xi * xi) / (np.pi * (d * d - xi * xi))
    return out if out.ndim else float(out)


def arcsine_moment(k):
    """k-th moment of the real part law: central binomial for even k, else 0."""
    if k < 0 or int(k) != k:
        raise ValueError("moment order must be a non-negative integer")
    k = int(k)
    return math.comb(k, k // 2) if k % 2 == 0 else 0


# --------------------------------------------------------------------------
# measures built from the closed forms


def shifted_unitary_sv_measure(r, n_mid=2400, n_edge=700):
    """f_r tabulated on an edge-refined grid as a measure on R+ (r > 0)."""
    if r <= 0:
        raise AtomicCaseError("r=0 law is a single atom at x=1; no density")
    a, b = abs(r - 1.0), r + 1.0
    edges = [b] if a == 0.0 else [a, b]
    return SpectralMeasure.from_density_fn(
        lambda x: density_f_r(r, x), (a, b), sqrt_edges=edges,
        n_mid=n_mid, n_edge=n_edge)


def theta1_measure(v, n_mid=2400, n_edge=700):
    """Symmetrized singular-value law of a Haar unitary shifted by v.

    Purely atomic (+/-1 with equal mass) at v = 0; otherwise the
    symmetrization of f_{|v|}.
    """
    r = abs(v)
    if r == 0.0:
        return SpectralMeasure.from_atoms([(-1.0, 0.5), (1.0, 0.5)])
    return symmetrize(shifted_unitary_sv_measure(r, n_mid=n_mid, n_edge=n_edge))


def abs_sd_measure(d, n_mid=2400, n_edge=700):
    """Zero-shift limiting singular-value law of the d-fold sum, on R+."""
    b = 2.0 * math.sqrt(d - 1.0)
    # for d = 2 the upper edge diverges like an inverse square root; for
    # d >= 3 the density vanishes there with a square-root cusp -- both are
    # integrated accurately by the same t^2 substitution
    return SpectralMeasure.from_density_fn(
        lambda x: density_abs_sd(d, x), (0.0, b), sqrt_edges=(b,),
        n_mid=n_mid, n_edge=n_edge)


# --------------------------------------------------------------------------
# closed-form base Stieltjes transform


def _resolve_branch_by_continuity(r, z):
    """Track the decaying branch of z/sqrt((z^2-1-r^2)^2-4r^2) down to z."""
    x, y = float(np.real(z)), float(np.imag(z))
    heights = [10.0]
    while heights[-1] > y:
        heights.append(max(heights[-1] * 0.5, y))
        if heights[-1] == y:
            break
    prev = 1.0 / complex(x, heights[0])
    val = prev
    for h in heights:
        w = complex(x, h)
        s = np.sqrt((w * w - 1.0 - r * r) ** 2 - 4.0 * r * r)
        cand = w / s
        val = cand if abs(cand - prev) <= abs(-cand - prev) else -cand
        prev = val
    return val


def stieltjes_G1(v, z):
    """Stieltjes transform of the symmetrized shifted-unitary law.

    G(z) = z / sqrt((z^2 - 1 - r^2)^2 - 4 r^2) with r = |v|, on the branch
    with Im G <= 0 in the upper half-plane and G ~ 1/z at infinity; for
    r = 0 this reduces exactly to z / (z^2 - 1).

    Parameters
    ----------
    v : complex
        Shift; only |v| enters (the law is radially symmetric in v).
    z : complex or ndarray
        Points in the open upper half-plane.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("stieltjes_G1 is defined on the open upper half-plane")
    r = abs(v)
    if r == 0.0:
        out = z / (z * z - 1.0)
        return out if out.ndim else complex(out)
    w = (z * z - 1.0 - r * r) ** 2 - 4.0 * r * r
    s = np.sqrt(w)
    cand = z / s
    out = np.where(cand.imag <= 0.0, cand, -cand)
    # near-real values cannot be sign-resolved pointwise; walk down from 10i
    tie = np.abs(cand.imag) <= 1e-13 * np.abs(cand)
    if np.any(tie):
        flat = out.reshape(-1)
        zflat = z.reshape(-1)
        for idx in np.nonzero(tie.reshape(-1))[0]:
            flat[idx] = _resolve_branch_by_continuity(r, zflat[idx])
        out = flat.reshape(out.shape)
    return out if out.ndim else complex(out)
