"""Analytic route for a single Haar orthogonal summand, odd dimensions.

The orthogonal group splits into determinant classes; in odd dimension
n = 2l+1 a class representative is diag(+/-1, R(theta_1), ..., R(theta_l))
with 2x2 rotation blocks, and each angle has an explicit bounded marginal
density.  Averaging the hermitized resolvent over the class measures turns
the expected Stieltjes transform at any shift into a one-dimensional
periodic quadrature, which converges to the closed-form unitary limit as
n grows.  Even n (where the class structure differs) is deliberately not
implemented on the analytic route; Monte Carlo covers it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .closed_forms import stieltjes_G1


@dataclass(frozen=True)
class OrthoClassSpec:
    """Odd dimension n = 2l+1 and determinant class sign (+1 or -1)."""

    n: int
    sign: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(
                f"analytic route needs odd n >= 3, got n={self.n}; even "
                f"dimensions are covered by Monte Carlo only")
        if self.sign not in (1, -1):
            raise ValueError("determinant class sign must be +1 or -1")

    @property
    def ell(self):
        return (self.n - 1) // 2


def _sin_ratio(ell, theta):
    """sin(2 l theta) / (2 l sin theta) with its removable singularities."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    tiny = np.abs(s) < 1e-9
    num = np.sin(2.0 * ell * theta)
    out = np.empty_like(theta)
    out[~tiny] = num[~tiny] / (2.0 * ell * s[~tiny])
    # limits: +1 at theta = 0, cos(2 l pi)/cos(pi) = -1 at theta = +/-pi
    near_zero = tiny & (np.abs(theta) < 0.5 * math.pi)
    out[near_zero] = 1.0
    out[tiny & ~near_zero] = -1.0
    return out


def angle_density_q(spec, theta):
    """Marginal density of a rotation angle in the given determinant class.

    q^{+/-}(theta) = (1/2pi) (1 -/+ sin(2 l theta)/(2 l sin theta)) on
    [-pi, pi], bounded by 1/pi uniformly in l and theta.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > math.pi + 1e-12):
        raise ValueError("angles live on [-pi, pi]")
    ratio = _sin_ratio(spec.ell, theta)
    out = (1.0 - spec.sign * ratio) / (2.0 * math.pi)
    return out if out.ndim else float(out)


def _g(z, r):
    return z / (z * z - r)


def weyl_class_g1(spec, v, z, n_theta=2048):
    """Expected hermitized resolvent trace over one determinant class.

    The fixed eigenvalue (+1 or -1) contributes a single shifted singular
    value; each rotation block contributes the pair
    1 + |v|^2 - 2|v| cos(theta -/+ arg v), averaged over the angle marginal
    by midpoint quadrature (spectrally accurate for these periodic
    integrands; the offset grid also avoids the removable singularities).
    """
    v = complex(v)
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the open upper half-plane")
    r = abs(v)
    psi = math.atan2(v.imag, v.real) if r > 0 else 0.0
    fixed = abs(1.0 - v) ** 2 if spec.sign == 1 else abs(1.0 + v) ** 2
    theta = -math.pi + (np.arange(n_theta) + 0.5) * (2.0 * math.pi / n_theta)
    qdens = angle_density_q(spec, theta)
    total = _g(z, fixed)
    for sgn in (1.0, -1.0):
        svals = 1.0 + r * r - 2.0 * r * np.cos(theta + sgn * psi)
        integrand = _g(z, svals) * qdens
        total += spec.ell * np.sum(integrand) * (2.0 * math.pi / n_theta)
    return total / spec.n


def weyl_G1_orthogonal(n, v, z, n_theta=2048):
    """Expected Stieltjes transform of the hermitized shifted orthogonal.

    Equal-weight average of the two determinant classes; satisfies the
    Stieltjes contract and converges to the closed-form unitary limit as
    n grows through odd values.
    """
    plus = weyl_class_g1(OrthoClassSpec(n=n, sign=1), v, z, n_theta=n_theta)
    minus = weyl_class_g1(OrthoClassSpec(n=n, sign=-1), v, z, n_theta=n_theta)
    return 0.5 * (plus + minus)


@dataclass(frozen=True)
class OrthoLimitReport:
    """Gap to the closed-form limit per dimension, with the trend verdict."""

    n_list: tuple
    gaps: tuple
    limit_value: complex
    decreasing: bool


def ortho_limit_check(v, z, n_list=(11, 31, 101), n_theta=2048):
    """Gaps |weyl(n) - closed form| over increasing odd n.

    The trend must be decreasing overall; a single inversion is tolerated
    (the gap is an oscillating O(1/n) correction, not a monotone bound).
    """
    n_list = tuple(int(n) for n in n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    limit = complex(stieltjes_G1(v, z))
    gaps = tuple(abs(weyl_G1_orthogonal(n, v, z, n_theta=n_theta) - limit)
                 for n in n_list)
    inversions = sum(1 for a, b in zip(gaps, gaps[1:]) if b >= a)
    return OrthoLimitReport(n_list=n_list, gaps=gaps, limit_value=limit,
                            decreasing=inversions <= 1)
