"""Empirical-measure statistics and goodness-of-fit machinery.

The verification suite reduces every distributional claim to either a
Kolmogorov-Smirnov test against an analytic CDF (p-values from the
asymptotic Kolmogorov distribution) or a Wasserstein-1 distance between an
empirical radial law and a closed-form radial CDF.

`clt_variance` evaluates the limiting variance of centered linear
statistics sum_k f(lambda_k) of the planar beta = 2 gas:

    (1 / 4 pi) * int_D |grad f|^2  +  (1/2) * sum_k |k| |fhat(k)|^2

with the disc integral by polar Gauss-Legendre quadrature and the boundary
Fourier coefficients from a 4096-point trapezoid rule, modes |k| <= 64.
The Fourier half-norm vanishes for radial f, so for those the variance is
pure Dirichlet energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .equilibrium import EquilibriumMeasure
from .exactlaws import DistributionSpec
from .special import kolmogorov_sf

__all__ = [
    "EmpiricalMeasure",
    "GofReport",
    "TestFunction",
    "radial_profile",
    "harmonic",
    "bivariate_polynomial",
    "ks_test",
    "ks_two_sample",
    "w1_radial",
    "angular_uniformity",
    "clt_variance",
    "linear_statistic",
    "sphere_z_uniformity",
]

_FOURIER_NODES = 4096
_FOURIER_MAX_MODE = 64


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform weights 1/n on a finite point set."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            raise ValueError("empirical measure needs at least one point")
        object.__setattr__(self, "points", pts)

    def radii(self) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(self.points), axis=-1)


@dataclass(frozen=True)
class GofReport:
    """Outcome of one goodness-of-fit check."""

    test: str
    statistic: float
    p_value: Optional[float]
    n_samples: int
    oracle: str


@dataclass(frozen=True)
class TestFunction:
    """C^1 test function on the plane with an analytic gradient."""

    kind: str
    value: Callable[[np.ndarray], np.ndarray]  # (..., 2) -> (...)
    gradient: Callable[[np.ndarray], np.ndarray]  # (..., 2) -> (..., 2)
    label: str = ""

    def on_complex(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        pts = np.stack([z.real, z.imag], axis=-1)
        return self.value(pts)


def radial_profile(h: Callable, h_prime: Callable, label: str = "radial") -> TestFunction:
    """f(z) = h(|z|); the profile must be smooth with h'(0) = 0."""

    def value(pts):
        r = np.linalg.norm(pts, axis=-1)
        return np.vectorize(h)(r)

    def gradient(pts):
        pts = np.asarray(pts, dtype=float)
        r = np.linalg.norm(pts, axis=-1)
        safe = np.where(r == 0.0, 1.0, r)
        coef = np.vectorize(h_prime)(r) / safe
        coef = np.where(r == 0.0, 0.0, coef)
        return coef[..., None] * pts

    return TestFunction("radial", value, gradient, label)


def harmonic(k: int, part: str = "re") -> TestFunction:
    """Real or imaginary part of z^k."""
    if k < 1:
        raise ValueError("need k >= 1")
    if part not in ("re", "im"):
        raise ValueError("part must be 're' or 'im'")

    def _z(pts):
        pts = np.asarray(pts, dtype=float)
        return pts[..., 0] + 1j * pts[..., 1]

    def value(pts):
        zk = _z(pts) ** k
        return zk.real if part == "re" else zk.imag

    def gradient(pts):
        w = k * _z(pts) ** (k - 1)
        if part == "re":
            gx, gy = w.real, -w.imag
        else:
            gx, gy = w.imag, w.real
        return np.stack([gx, gy], axis=-1)

    return TestFunction("harmonic", value, gradient, f"{part}(z^{k})")


def bivariate_polynomial(coeffs: np.ndarray) -> TestFunction:
    """f(x, y) = sum_ij c[i, j] x^i y^j with real coefficients."""
    from numpy.polynomial import polynomial as P

    c = np.asarray(coeffs, dtype=float)
    cx = P.polyder(c, axis=0)
    cy = P.polyder(c, axis=1)

    def value(pts):
        pts = np.asarray(pts, dtype=float)
        return P.polyval2d(pts[..., 0], pts[..., 1], c)

    def gradient(pts):
        pts = np.asarray(pts, dtype=float)
        gx = P.polyval2d(pts[..., 0], pts[..., 1], cx)
        gy = P.polyval2d(pts[..., 0], pts[..., 1], cy)
        return np.stack([gx, gy], axis=-1)

    return TestFunction("polynomial", value, gradient, "poly")


def _resolve_cdf(oracle) -> tuple[Callable[[np.ndarray], np.ndarray], str]:
    if isinstance(oracle, DistributionSpec):
        return np.vectorize(oracle.cdf), repr(oracle)
    if callable(oracle):
        return np.vectorize(oracle), getattr(oracle, "__name__", "callable cdf")
    raise TypeError("oracle must be a DistributionSpec or a CDF callable")


def ks_test(samples: np.ndarray, oracle) -> GofReport:
    """One-sample Kolmogorov-Smirnov test against an analytic CDF."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    cdf, name = _resolve_cdf(oracle)
    f = cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    p = kolmogorov_sf(math.sqrt(n) * d)
    return GofReport("KS", d, p, n, name)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> GofReport:
    """Two-sample KS with effective size n1 n2 / (n1 + n2); symmetric."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n1, n2 = a.size, b.size
    if min(n1, n2) < 8:
        raise ValueError("need at least 8 samples on each side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / n1
    fb = np.searchsorted(b, grid, side="right") / n2
    d = float(np.max(np.abs(fa - fb)))
    n_eff = n1 * n2 / (n1 + n2)
    p = kolmogorov_sf(math.sqrt(n_eff) * d)
    return GofReport("KS", d, p, n1 + n2, "two-sample")


def w1_radial(samples: np.ndarray, measure: EquilibriumMeasure) -> float:
    """Wasserstein-1 distance between the empirical radius law and the
    measure's radial law, as the exact integral of |F_emp - F|.

    Between consecutive order statistics F_emp is constant, so each piece
    integrates in closed form through the measure's CDF antiderivative; the
    segment containing the crossing point is split at the exact quantile.
    """
    if not measure.is_radial:
        raise ValueError("radial W1 needs a rotationally invariant measure")
    if measure.radial_cdf_integral is None or measure.mean_radius is None:
        raise ValueError(f"preset {measure.label!r} lacks a CDF antiderivative")
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    r = np.sort(np.linalg.norm(pts, axis=-1))
    n = r.size
    big_i = np.vectorize(measure.radial_cdf_integral)
    cdf = np.vectorize(measure.radial_cdf)

    total = float(big_i(r[0]))  # below the smallest radius: F_emp = 0
    levels = np.arange(1, n) / n
    lo, hi = r[:-1], r[1:]
    f_lo, f_hi = cdf(lo), cdf(hi)
    i_lo, i_hi = big_i(lo), big_i(hi)
    width = hi - lo
    seg_int = i_hi - i_lo

    above = f_lo >= levels  # F >= level on the whole segment
    below = f_hi <= levels  # F <= level on the whole segment
    crossing = ~(above | below)
    total += float(np.sum(seg_int[above] - levels[above] * width[above]))
    total += float(np.sum(levels[below] * width[below] - seg_int[below]))
    if np.any(crossing):
        idx = np.nonzero(crossing)[0]
        for j in idx:
            c = levels[j]
            r_star = measure.quantile(float(c))
            left = c * (r_star - lo[j]) - (measure.radial_cdf_integral(r_star) - i_lo[j])
            right = (i_hi[j] - measure.radial_cdf_integral(r_star)) - c * (hi[j] - r_star)
            total += left + right
    # tail beyond the largest radius: F_emp = 1, integral of (1 - F)
    total += measure.mean_radius - (float(r[-1]) - float(big_i(r[-1])))
    return total


def angular_uniformity(samples: np.ndarray) -> GofReport:
    """KS of the planar angles (mapped to [0, 1)) against Uniform(0, 1)."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    norms = np.linalg.norm(pts, axis=-1)
    if np.any(norms == 0.0):
        raise ValueError("angles undefined for points at the origin")
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    u = (theta / (2.0 * math.pi)) % 1.0
    report = ks_test(u, lambda x: min(1.0, max(0.0, x)))
    return GofReport("KS", report.statistic, report.p_value, report.n_samples, "uniform angle")


def clt_variance(f: TestFunction, n_radial: int = 128, n_angular: int = 512) -> float:
    """Limiting variance of the centered linear statistic of f.

    Dirichlet term over the unit disc by Gauss-Legendre x trapezoid polar
    quadrature; boundary half-norm from FFT coefficients on 4096 circle
    nodes, modes |k| <= 64.
    """
    x, w = np.polynomial.legendre.leggauss(n_radial)
    radii = 0.5 * (x + 1.0)
    wr = 0.5 * w
    thetas = np.arange(n_angular) * (2.0 * math.pi / n_angular)
    grid = np.empty((n_radial, n_angular, 2))
    grid[..., 0] = radii[:, None] * np.cos(thetas)[None, :]
    grid[..., 1] = radii[:, None] * np.sin(thetas)[None, :]
    g = f.gradient(grid)
    g2 = np.sum(g * g, axis=-1)
    disc = float(np.sum(wr[:, None] * radii[:, None] * g2) * (2.0 * math.pi / n_angular))
    h1_term = disc / (4.0 * math.pi)

    circle_t = np.arange(_FOURIER_NODES) * (2.0 * math.pi / _FOURIER_NODES)
    circle = np.stack([np.cos(circle_t), np.sin(circle_t)], axis=-1)
    vals = np.asarray(f.value(circle), dtype=float)
    coeffs = np.fft.fft(vals) / _FOURIER_NODES
    ks = np.fft.fftfreq(_FOURIER_NODES, d=1.0 / _FOURIER_NODES)
    mask = np.abs(ks) <= _FOURIER_MAX_MODE
    half_term = 0.5 * float(np.sum(np.abs(ks[mask]) * np.abs(coeffs[mask]) ** 2))
    return h1_term + half_term


def linear_statistic(samples, f: TestFunction) -> np.ndarray:
    """sum_k f(point_k) per sample; accepts complex spectra, point arrays,
    or objects carrying .points / .eigenvalues."""
    out = []
    for s in samples:
        if hasattr(s, "eigenvalues"):
            out.append(float(np.sum(f.on_complex(s.eigenvalues))))
        elif hasattr(s, "points"):
            out.append(float(np.sum(f.value(s.points))))
        else:
            arr = np.asarray(s)
            if np.iscomplexobj(arr):
                out.append(float(np.sum(f.on_complex(arr))))
            else:
                out.append(float(np.sum(f.value(np.atleast_2d(arr)))))
    return np.array(out)


def sphere_z_uniformity(points: np.ndarray) -> GofReport:
    """KS of the third sphere coordinate against Uniform(-1, 1).

    The uniform law on the sphere has uniformly distributed axis
    projections, so this is a one-line characterization test.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 3:
        raise ValueError("expected points on the 2-sphere")
    norms = np.linalg.norm(pts, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise ValueError("points must have unit norm")
    z = pts[:, 2]
    report = ks_test(z, lambda x: min(1.0, max(0.0, 0.5 * (x + 1.0))))
    return GofReport("KS", report.statistic, report.p_value, report.n_samples, "uniform z on sphere")
