"""Exact determinantal quantities for the quadratically confined planar gas
at beta = 2 (the Ginibre gas).

Everything reduces to the reproducing kernel

    K_n(z, w) = sqrt(gamma(z) gamma(w)) * e_n(z conj(w)),
    gamma(u) = exp(-|u|^2) / pi,

where e_n(z) = sum_{l < n} z^l / l! is the truncated exponential series:
the k-point marginal density is ((n-k)!/n!) det[K_n(z_i, z_j)].

Large-n evaluations pair exp(-n |z|^2) with e_n(n ...) whose magnitudes
overflow separately around n ~ 200, so those products are assembled in
log space: the log magnitude of e_n is obtained by factoring out the
largest term of the series before summing.

The truncated series obeys the deterministic envelope

    |e_n(nz) - e^{nz} 1_{|z|<=1}| <= r_n(z)

with r_n given in `remainder_bound`; this is the quantitative input behind
the convergence of the one-point density to the circular law.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .special import reg_upper_gamma

__all__ = [
    "NegativeDensityError",
    "truncated_exp",
    "log_abs_truncated_exp",
    "remainder_bound",
    "envelope_gap",
    "kernel_K",
    "density_kpoint",
    "scaled_one_point",
    "two_point_defect",
    "gamma_poisson_tail",
    "polar_quadrature",
]


class NegativeDensityError(RuntimeError):
    """A determinantal density evaluated below -1e-12: indicates a bug."""


def truncated_exp(n: int, z: complex) -> complex:
    """e_n(z) = sum_{l=0}^{n-1} z^l / l!, by compensated (Kahan) summation.

    Direct evaluation; for |z| large enough that e^|z| overflows the double
    range use `log_abs_truncated_exp` instead.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    z = complex(z)
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    term = 1.0 + 0.0j
    for ell in range(n):
        if ell > 0:
            term *= z / ell
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def log_abs_truncated_exp(n: int, z: complex) -> float:
    """log |e_n(z)|, stable for arguments far beyond double overflow.

    The largest series term is factored out, the rescaled terms (all of
    modulus <= 1) are summed exactly, and its log magnitude is added back.
    Returns -inf when the sum vanishes (z = 0 has e_n = 1, log = 0).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        return 0.0
    ell = np.arange(n)
    log_mags = ell * math.log(r) - np.array([math.lgamma(k + 1.0) for k in ell])
    m = float(np.max(log_mags))
    phases = np.exp(1j * ell * np.angle(z))
    s = np.sum(np.exp(log_mags - m) * phases)
    mag = abs(s)
    if mag == 0.0:
        return -math.inf
    return m + math.log(mag)


def remainder_bound(n: int, z: complex) -> float:
    """Envelope r_n(z) of the truncated-exponential approximation error.

    r_n(z) = e^n / sqrt(2 pi n) * |z|^n * ((n+1)/(n(1-|z|)+1) if |z| <= 1
    else n/(n(|z|-1)+1)), assembled in log space so large n or |z| do not
    overflow prematurely.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    r = abs(complex(z))
    if r == 0.0:
        return 0.0
    if r <= 1.0:
        branch = (n + 1.0) / (n * (1.0 - r) + 1.0)
    else:
        branch = n / (n * (r - 1.0) + 1.0)
    log_val = n - 0.5 * math.log(2.0 * math.pi * n) + n * math.log(r) + math.log(branch)
    if log_val > 700.0:
        return math.inf
    return math.exp(log_val)


def envelope_gap(n: int, z: complex) -> tuple[float, float]:
    """(|e_n(nz) - e^{nz} 1_{|z|<=1}|, r_n(z)) without catastrophic cancellation.

    Inside the closed unit disc the error equals the tail
    sum_{l>=n} (nz)^l / l!, which is summed directly (its first term
    dominates there, so the double result is accurate relative to the
    envelope); outside, the error is |e_n(nz)| itself. Subtracting two
    O(e^{n Re z}) quantities instead would drown the tiny true difference
    in round-off.
    """
    z = complex(z)
    bound = remainder_bound(n, z)
    w = n * z
    if abs(z) <= 1.0:
        term = 1.0 + 0.0j
        for ell in range(1, n):
            term *= w / ell
        total = 0.0 + 0.0j
        comp = 0.0 + 0.0j
        ell = n
        while ell < n + 200_000:
            term *= w / ell
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
            ell += 1
            if abs(term) <= 1e-18 * abs(total) + 1e-300:
                break
        lhs = abs(total)
    else:
        lhs = abs(truncated_exp(n, w))
    return lhs, bound


def _gaussian_weight(z: complex) -> float:
    return math.exp(-abs(z) ** 2) / math.pi


def kernel_K(n: int, z: complex, w: complex) -> complex:
    """Reproducing kernel K_n(z, w) = sqrt(gamma(z) gamma(w)) e_n(z conj(w))."""
    if n < 1:
        raise ValueError("need n >= 1")
    return math.sqrt(_gaussian_weight(z) * _gaussian_weight(w)) * truncated_exp(
        n, z * np.conj(w)
    )


def density_kpoint(n: int, points) -> float:
    """k-point marginal density ((n-k)!/n!) det[K_n(z_i, z_j)].

    The kernel matrix is Hermitian positive semidefinite, so the true value
    is nonnegative; round-off in [-1e-12, 0) is clamped to 0, anything more
    negative raises.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    k = pts.size
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    mat = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            mat[i, j] = kernel_K(n, pts[i], pts[j])
    det = np.linalg.det(mat)
    prefactor = 1.0
    for j in range(n - k + 1, n + 1):
        prefactor /= j
    val = float(det.real) * prefactor
    if val < -1e-12:
        raise NegativeDensityError(f"density {val:.3e} below the round-off floor")
    return max(val, 0.0)


def scaled_one_point(n: int, z: complex) -> float:
    """Density of the scaled mean empirical measure at z:
    (1/pi) exp(-n|z|^2) e_n(n|z|^2), evaluated in log space.

    Converges to the circular law (1/pi on the unit disc) as n grows.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    x = n * abs(complex(z)) ** 2
    log_en = log_abs_truncated_exp(n, x)
    return math.exp(log_en - x) / math.pi


def two_point_defect(n: int, z1: complex, z2: complex) -> float:
    """Factorization defect of the scaled two-point density.

    Delta_n(z1, z2) = phi2(z1, z2) - phi1(z1) phi1(z2)
                    = phi1(z1) phi1(z2) / (n-1)
                      - (n/(n-1)) exp(-n(|z1|^2+|z2|^2)) |e_n(n z1 conj(z2))|^2 / pi^2

    evaluated with log-space magnitudes. Tends to zero away from the unit
    circle and the diagonal; at z1 = z2 it equals -phi1(z)^2 exactly.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    z1 = complex(z1)
    z2 = complex(z2)
    p1 = scaled_one_point(n, z1)
    p2 = scaled_one_point(n, z2)
    log_cross = 2.0 * log_abs_truncated_exp(n, n * z1 * np.conj(z2))
    expo = log_cross - n * (abs(z1) ** 2 + abs(z2) ** 2)
    cross = math.exp(expo) / math.pi**2 if expo > -745.0 else 0.0
    return p1 * p2 / (n - 1.0) - n / (n - 1.0) * cross


def gamma_poisson_tail(n: int, r: float) -> tuple[float, float]:
    """Both sides of the Gamma/Poisson tail identity.

    Returns (regularized upper incomplete gamma Q(n, r),
    e^-r sum_{l<n} r^l / l!); the two agree identically in exact
    arithmetic.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if r <= 0:
        raise ValueError("need r > 0")
    side_gamma = reg_upper_gamma(float(n), r)
    total = 0.0
    comp = 0.0
    term = 1.0
    for ell in range(n):
        if ell > 0:
            term *= r / ell
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    side_poisson = math.exp(-r) * total
    return side_gamma, side_poisson


def polar_quadrature(
    f: Callable[[complex], float],
    r_max: float,
    n_r: int = 160,
    n_theta: int = 256,
) -> float:
    """Integral of f over the disc of radius r_max in polar coordinates.

    Gauss-Legendre nodes in the radius, uniform trapezoid in the angle (the
    angular rule is exact for trigonometric polynomials of degree below
    n_theta / 2, which covers the kernel integrands used in the checks).
    """
    x, w = np.polynomial.legendre.leggauss(n_r)
    radii = 0.5 * r_max * (x + 1.0)
    wr = 0.5 * r_max * w
    thetas = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    total = 0.0
    for r, wi in zip(radii, wr):
        ring = sum(f(r * complex(math.cos(t), math.sin(t))) for t in thetas)
        total += wi * r * ring * (2.0 * math.pi / n_theta)
    return total
