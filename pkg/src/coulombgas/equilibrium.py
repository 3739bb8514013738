"""Closed-form equilibrium measures and their logarithmic potentials.

Each preset ships the radial density and CDF in closed form, together with
the CDF antiderivative and mean radius where the distance computations in
`coulombgas.stats` want them. The planar potentials of the uniform circle
and disc are the two cases with elementary closed forms:

    circle radius r:  U(x) = -log r          for |x| <= r,  -log|x| outside
    disc radius R:    U(x) = -(|x|^2/R^2 - 1 + 2 log R)/2   inside, -log|x| outside

with energies -log(r)/2 and 1/4 - log R. For any other rotationally
invariant measure the potential is assembled from the circle case by
integrating over shells: U(t) = -F(t) log t - int_t^inf log(s) dF(s),
which reduces the evaluation to a one-dimensional quadrature.

The `euler_lagrange_residual` check exploits the variational
characterization of the equilibrium measure: U + V is constant on the
support and >= that constant outside, so a wrong candidate measure shows a
large residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .kernel import Potential, c_d

__all__ = [
    "EquilibriumMeasure",
    "QuadratureError",
    "equilibrium_for",
    "radial_cdf_closed",
    "potential_uniform_circle",
    "potential_uniform_disc",
    "energy_uniform_closed",
    "density_from_laplacian",
    "coulomb_potential_radial",
    "euler_lagrange_residual",
    "sample_equilibrium",
]


class QuadratureError(RuntimeError):
    """Adaptive integration failed to reach the requested accuracy."""


@dataclass(frozen=True)
class EquilibriumMeasure:
    """A limiting particle distribution with closed-form radial laws.

    For rotationally invariant presets the coordinate is the radius r >= 0;
    for the line-supported presets (semicircle, arcsine) it is the position
    s in [lo, hi] and `is_radial` is False.
    """

    label: str
    dim: int
    is_radial: bool
    support: tuple[float, float]
    radial_density: Callable[[float], float]
    radial_cdf: Callable[[float], float]
    radial_quantile: Callable[[float], float] | None = None
    radial_cdf_integral: Callable[[float], float] | None = None
    mean_radius: float | None = None
    spatial_density: Callable[[np.ndarray], float] | None = None
    params: dict = field(default_factory=dict)

    @property
    def support_radius(self) -> float:
        return self.support[1]

    def quantile(self, u: float) -> float:
        if self.radial_quantile is not None:
            return self.radial_quantile(u)
        return _bisect_cdf(self.radial_cdf, self.support, u)


def _bisect_cdf(cdf, support, u, tol=1e-12):
    """Generic inverse CDF by bisection, expanding the bracket if unbounded."""
    lo, hi = support
    if not math.isfinite(hi):
        hi = max(1.0, lo + 1.0)
        while cdf(hi) < u:
            hi *= 2.0
            if hi > 1e300:
                raise ValueError("quantile bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * (1.0 + abs(mid)):
            break
        if cdf(mid) < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _uniform_ball(d: int) -> EquilibriumMeasure:
    if d < 2:
        raise ValueError("uniform ball preset needs d >= 2")
    omega_d = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    return EquilibriumMeasure(
        label="uniform_ball",
        dim=d,
        is_radial=True,
        support=(0.0, 1.0),
        radial_density=lambda r: d * r ** (d - 1) if 0.0 <= r <= 1.0 else 0.0,
        radial_cdf=lambda r: 0.0 if r <= 0.0 else min(1.0, r**d),
        radial_quantile=lambda u: u ** (1.0 / d),
        radial_cdf_integral=lambda r: (
            min(r, 1.0) ** (d + 1) / (d + 1) + max(0.0, r - 1.0)
        ),
        mean_radius=d / (d + 1.0),
        spatial_density=lambda x: (1.0 / omega_d) if np.linalg.norm(x) <= 1.0 else 0.0,
        params={"d": d},
    )


def _uniform_disc() -> EquilibriumMeasure:
    import dataclasses

    return dataclasses.replace(_uniform_ball(2), label="uniform_disc", params={})


def _spherical_heavy_tail() -> EquilibriumMeasure:
    return EquilibriumMeasure(
        label="spherical_heavy_tail",
        dim=2,
        is_radial=True,
        support=(0.0, math.inf),
        radial_density=lambda r: 2.0 * r / (1.0 + r * r) ** 2 if r >= 0.0 else 0.0,
        radial_cdf=lambda r: 0.0 if r <= 0.0 else r * r / (1.0 + r * r),
        radial_quantile=lambda u: math.sqrt(u / (1.0 - u)) if u < 1.0 else math.inf,
        radial_cdf_integral=lambda r: r - math.atan(r),
        mean_radius=math.pi / 2.0,
        spatial_density=lambda x: 1.0 / (math.pi * (1.0 + float(np.linalg.norm(x)) ** 2) ** 2),
    )


def _truncation_limit(alpha: float) -> EquilibriumMeasure:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    ra = math.sqrt(alpha)
    k = (1.0 - alpha) / alpha

    def cdf(r: float) -> float:
        if r <= 0.0:
            return 0.0
        if r >= ra:
            return 1.0
        return k * r * r / (1.0 - r * r)

    def cdf_integral(r: float) -> float:
        rc = min(r, ra)
        val = k * (math.atanh(rc) - rc)
        return val + max(0.0, r - ra)

    return EquilibriumMeasure(
        label="truncation_limit",
        dim=2,
        is_radial=True,
        support=(0.0, ra),
        radial_density=lambda r: 2.0 * k * r / (1.0 - r * r) ** 2 if 0.0 <= r < ra else 0.0,
        radial_cdf=cdf,
        radial_quantile=lambda u: math.sqrt(u * alpha / (1.0 - alpha + u * alpha)),
        radial_cdf_integral=cdf_integral,
        mean_radius=ra - k * (math.atanh(ra) - ra),
        spatial_density=lambda x: (
            (1.0 - alpha) / (math.pi * alpha * (1.0 - float(np.linalg.norm(x)) ** 2) ** 2)
            if np.linalg.norm(x) <= ra
            else 0.0
        ),
        params={"alpha": alpha},
    )


def _product_limit(m: int) -> EquilibriumMeasure:
    if m < 1:
        raise ValueError(f"factor count must be >= 1, got {m}")
    p = 2.0 / m
    return EquilibriumMeasure(
        label="product_limit",
        dim=2,
        is_radial=True,
        support=(0.0, 1.0),
        radial_density=lambda r: p * r ** (p - 1.0) if 0.0 < r <= 1.0 else 0.0,
        radial_cdf=lambda r: 0.0 if r <= 0.0 else min(1.0, r**p),
        radial_quantile=lambda u: u ** (1.0 / p),
        radial_cdf_integral=lambda r: (
            min(r, 1.0) ** (p + 1.0) / (p + 1.0) + max(0.0, r - 1.0)
        ),
        mean_radius=p / (p + 1.0),
        spatial_density=lambda x: (
            float(np.linalg.norm(x)) ** (p - 2.0) / (m * math.pi)
            if 0.0 < np.linalg.norm(x) <= 1.0
            else 0.0
        ),
        params={"m": m},
    )


def _semicircle() -> EquilibriumMeasure:
    def cdf(s: float) -> float:
        if s <= -2.0:
            return 0.0
        if s >= 2.0:
            return 1.0
        return 0.5 + s * math.sqrt(4.0 - s * s) / (4.0 * math.pi) + math.asin(s / 2.0) / math.pi

    return EquilibriumMeasure(
        label="semicircle",
        dim=1,
        is_radial=False,
        support=(-2.0, 2.0),
        radial_density=lambda s: math.sqrt(max(0.0, 4.0 - s * s)) / (2.0 * math.pi),
        radial_cdf=cdf,
    )


def _arcsine(a: float, b: float) -> EquilibriumMeasure:
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")

    def density(s: float) -> float:
        if not (a < s < b):
            return 0.0
        return 1.0 / (math.pi * math.sqrt((s - a) * (b - s)))

    def cdf(s: float) -> float:
        if s <= a:
            return 0.0
        if s >= b:
            return 1.0
        return (2.0 / math.pi) * math.asin(math.sqrt((s - a) / (b - a)))

    return EquilibriumMeasure(
        label="arcsine",
        dim=1,
        is_radial=False,
        support=(a, b),
        radial_density=density,
        radial_cdf=cdf,
        radial_quantile=lambda u: a + (b - a) * math.sin(math.pi * u / 2.0) ** 2,
        params={"a": a, "b": b},
    )


_FACTORIES = {
    "uniform_ball": _uniform_ball,
    "uniform_disc": _uniform_disc,
    "spherical_heavy_tail": _spherical_heavy_tail,
    "truncation_limit": _truncation_limit,
    "product_limit": _product_limit,
    "semicircle": _semicircle,
    "arcsine": _arcsine,
}


def equilibrium_for(label: str, **params) -> EquilibriumMeasure:
    """Build a preset by name: uniform_ball(d), uniform_disc,
    spherical_heavy_tail, truncation_limit(alpha), product_limit(m),
    semicircle, arcsine(a, b)."""
    try:
        factory = _FACTORIES[label]
    except KeyError:
        raise ValueError(f"unknown equilibrium preset {label!r}") from None
    return factory(**params)


def radial_cdf_closed(measure: EquilibriumMeasure, r: float) -> float:
    """Closed-form CDF of the radius (or line coordinate) at r."""
    if r < measure.support[0]:
        return 0.0
    return measure.radial_cdf(r)


def potential_uniform_circle(r: float, x: np.ndarray) -> float:
    """Logarithmic potential of the uniform law on the circle of radius r."""
    if r <= 0:
        raise ValueError("circle radius must be positive")
    t = float(np.linalg.norm(np.asarray(x, dtype=float)))
    return -math.log(r) if t <= r else -math.log(t)


def potential_uniform_disc(R: float, x: np.ndarray) -> float:
    """Logarithmic potential of the uniform law on the disc of radius R."""
    if R <= 0:
        raise ValueError("disc radius must be positive")
    t = float(np.linalg.norm(np.asarray(x, dtype=float)))
    if t <= R:
        return -0.5 * (t * t / (R * R) - 1.0 + 2.0 * math.log(R))
    return -math.log(t)


def energy_uniform_closed(kind: str, radius: float) -> float:
    """Closed-form self-interaction energies of the uniform circle and disc:
    -log(r)/2 and 1/4 - log R.

    Conventions differ between the two classical displays: the circle value
    is half the pair integral (1/2) int U dmu, the disc value is the full
    pair integral int U dmu.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if kind == "circle":
        return -math.log(radius) / 2.0
    if kind == "disc":
        return 0.25 - math.log(radius)
    raise ValueError(f"kind must be 'circle' or 'disc', got {kind!r}")


def density_from_laplacian(V: Potential, x: np.ndarray, dim: int) -> float:
    """Candidate equilibrium density Delta V / c_d at x."""
    return V.laplacian(np.asarray(x, dtype=float)) / c_d(dim)


def coulomb_potential_radial(measure: EquilibriumMeasure, t: float, tol: float = 1e-10) -> float:
    """Potential of a rotationally invariant planar measure at radius t.

    Shell decomposition: each radius-s circle contributes -log max(s, t),
    so U(t) = -F(t) log t - int_t^hi log(s) f(s) ds.
    """
    if not measure.is_radial or measure.dim != 2:
        raise ValueError("shell decomposition needs a rotationally invariant planar measure")
    hi = measure.support[1]
    val, err = integrate.quad(
        lambda s: math.log(s) * measure.radial_density(s),
        t,
        hi,
        epsabs=tol,
        epsrel=tol,
        limit=200,
    )
    if err > 1e-6 * (1.0 + abs(val)):
        raise QuadratureError(f"potential quadrature error {err:.2e} at t={t}")
    head = measure.radial_cdf(t) * math.log(t) if t > 0.0 else 0.0
    return -head - val


def euler_lagrange_residual(
    V: Potential, measure: EquilibriumMeasure, grid: np.ndarray
) -> float:
    """Max deviation of U + V from its grid median over points in the support.

    Near zero for the true equilibrium measure of V; order-one for a wrong
    candidate.
    """
    grid = np.asarray(grid, dtype=float)
    if measure.label in ("uniform_disc", "uniform_ball") and measure.dim == 2:
        u_vals = np.array([potential_uniform_disc(measure.support[1], x) for x in grid])
    else:
        u_vals = np.array(
            [coulomb_potential_radial(measure, float(np.linalg.norm(x))) for x in grid]
        )
    v_vals = np.array([V.value(x) for x in grid])
    total = u_vals + v_vals
    c = float(np.median(total))
    return float(np.max(np.abs(total - c)))


def sample_equilibrium(
    measure: EquilibriumMeasure, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n i.i.d. points from a rotationally invariant preset.

    Radius by inverse CDF, direction uniform on the sphere (uniform angle in
    the plane). Deterministic for a fixed generator state.
    """
    if not measure.is_radial:
        raise ValueError(f"preset {measure.label!r} is not rotationally invariant")
    d = measure.dim
    u = rng.random(n)
    radii = np.array([measure.quantile(float(ui)) for ui in u])
    if d == 2:
        theta = rng.random(n) * 2.0 * math.pi
        return np.column_stack([radii * np.cos(theta), radii * np.sin(theta)])
    dirs = rng.standard_normal((n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return radii[:, None] * dirs
