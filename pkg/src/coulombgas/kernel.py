"""Coulomb kernel, confining potentials, and the discrete gas energy.

The interaction kernel is the fundamental solution of the Poisson equation:
log(1/|x|) in the plane, 1/((d-2)|x|^(d-2)) in dimension d >= 3. A gas of n
particles carries the energy

    E_n(x_1..x_n) = n * sum_i V(x_i) + sum_{i<j} g(x_i - x_j),

and the Boltzmann weight exp(-beta * E_n) defines the target law of the
samplers. Energies support O(n) single-particle updates so that Metropolis
chains do not pay the full O(n^2) recomputation per move.

Coincident particles are an error state (`CollisionError`), never an infinite
energy: samplers treat colliding proposals as rejected moves, which keeps all
arithmetic finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "CollisionError",
    "Potential",
    "Quadratic",
    "SphericalLog",
    "RadialCustom",
    "GasParameters",
    "Configuration",
    "coulomb_g",
    "coulomb_grad",
    "c_d",
    "energy_total",
    "energy_delta",
    "gradient_energy",
]

# Relative tolerance of the cached total energy against a full recompute;
# chains refresh the cache every CACHE_REFRESH_MOVES accepted moves to keep
# incremental round-off below this bound.
ENERGY_CACHE_RTOL = 1e-9
CACHE_REFRESH_MOVES = 10_000


class CollisionError(ValueError):
    """Two particles coincide; the pair energy is not finite there."""


def _check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def coulomb_g(dim: int, x: np.ndarray) -> float:
    """Interaction kernel g(x): log(1/|x|) if d = 2, else |x|^(2-d)/(d-2)."""
    d = _check_dim(dim)
    r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    if r == 0.0:
        raise CollisionError("kernel is +inf at the origin")
    if d == 2:
        return -math.log(r)
    return r ** (2 - d) / (d - 2)


def coulomb_grad(dim: int, x: np.ndarray) -> np.ndarray:
    """Gradient of the kernel, -x / |x|^d for every d >= 2."""
    d = _check_dim(dim)
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise CollisionError("kernel gradient undefined at the origin")
    return -x / r**d


def c_d(dim: int) -> float:
    """Poisson-equation constant c_d = d * omega_d = 2 pi^(d/2) / Gamma(d/2)."""
    d = _check_dim(dim)
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


class Potential:
    """Confining potential V with gradient and Laplacian evaluations."""

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def laplacian(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def value_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized V over an (n, d) array; default falls back to a loop."""
        return np.array([self.value(p) for p in np.asarray(pts, dtype=float)])


@dataclass(frozen=True)
class Quadratic(Potential):
    """V(x) = gamma_coeff * |x|^2, the harmonic confinement."""

    gamma_coeff: float = 0.5

    def __post_init__(self):
        if self.gamma_coeff <= 0:
            raise ValueError("gamma_coeff must be positive")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma_coeff * float(x @ x)

    def grad(self, x):
        return 2.0 * self.gamma_coeff * np.asarray(x, dtype=float)

    def laplacian(self, x):
        return 2.0 * self.gamma_coeff * np.asarray(x).shape[-1]

    def value_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.gamma_coeff * np.einsum("ij,ij->i", pts, pts)


@dataclass(frozen=True)
class SphericalLog(Potential):
    """V(x) = (prefactor / 2) * log(1 + |x|^2), the weak confinement of the
    spherical ensemble.

    The prefactor carries the gas-size dependence ((n+1)/n for the spherical
    ensemble) and is bound when the potential is attached to a GasParameters;
    a bare SphericalLog() defaults the prefactor to 1.
    """

    prefactor: float | None = None

    def _c(self) -> float:
        return 1.0 if self.prefactor is None else self.prefactor

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self._c() * math.log1p(float(x @ x))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return self._c() * x / (1.0 + float(x @ x))

    def laplacian(self, x):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        r2 = float(x @ x)
        return self._c() * (d + (d - 2.0) * r2) / (1.0 + r2) ** 2

    def value_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        r2 = np.einsum("ij,ij->i", pts, pts)
        return 0.5 * self._c() * np.log1p(r2)


@dataclass(frozen=True)
class RadialCustom(Potential):
    """Radial potential from user callbacks h, h', h'' on the radius.

    The caller is responsible for the confinement/integrability of h; no
    generic guard is possible for arbitrary profiles.
    """

    h: Callable[[float], float]
    h_prime: Callable[[float], float]
    h_second: Callable[[float], float]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.h(float(np.linalg.norm(x)))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0.0:
            return np.zeros_like(x)
        return self.h_prime(r) * x / r

    def laplacian(self, x):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        r = float(np.linalg.norm(x))
        if r == 0.0:
            # radial Laplacian limit at the origin for a smooth even profile
            return d * self.h_second(0.0)
        return self.h_second(r) + (d - 1) * self.h_prime(r) / r


@dataclass(frozen=True)
class GasParameters:
    """Target law: n particles in R^dim at inverse temperature beta under V."""

    dim: int
    n: int
    beta: float
    potential: Potential = field(default_factory=Quadratic)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.n < 1:
            raise ValueError(f"particle count must be >= 1, got n={self.n}")
        if not (self.beta > 0):
            raise ValueError(f"beta must be positive, got beta={self.beta}")
        if isinstance(self.potential, SphericalLog) and self.potential.prefactor is None:
            bound = SphericalLog(prefactor=(self.n + 1) / self.n)
            object.__setattr__(self, "potential", bound)


@dataclass
class Configuration:
    """One state of n labeled particles, with the total energy cached."""

    points: np.ndarray  # shape (n, d)
    cached_energy: float = math.nan

    def __post_init__(self):
        self.points = np.array(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def copy(self) -> "Configuration":
        return Configuration(self.points.copy(), self.cached_energy)


def _pair_kernel_sum(pts: np.ndarray, d: int) -> float:
    """sum_{i<j} g(x_i - x_j), raising on exact collisions."""
    n = pts.shape[0]
    if n < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    iu = np.triu_indices(n, k=1)
    r2u = r2[iu]
    if np.any(r2u == 0.0):
        raise CollisionError("coincident particles in configuration")
    if d == 2:
        return float(-0.5 * np.sum(np.log(r2u)))
    p = (2.0 - d) / 2.0
    return float(np.sum(r2u**p) / (d - 2))


def energy_total(cfg: Configuration, p: GasParameters) -> float:
    """Total energy n * sum_i V(x_i) + sum_{i<j} g(x_i - x_j)."""
    pts = cfg.points
    v = float(np.sum(p.potential.value_many(pts)))
    return p.n * v + _pair_kernel_sum(pts, p.dim)


def energy_delta(cfg: Configuration, i: int, x_new: np.ndarray, p: GasParameters) -> float:
    """Energy change when particle i moves to x_new, in O(n).

    Exactly n*(V(x_new) - V(x_i)) + sum_{j != i} (g(x_new - x_j) - g(x_i - x_j)).
    """
    pts = cfg.points
    x_new = np.asarray(x_new, dtype=float)
    x_old = pts[i]
    dv = p.n * (p.potential.value(x_new) - p.potential.value(x_old))
    if cfg.n == 1:
        return dv
    mask = np.ones(cfg.n, dtype=bool)
    mask[i] = False
    others = pts[mask]
    dn = others - x_new
    do = others - x_old
    r2_new = np.einsum("ij,ij->i", dn, dn)
    r2_old = np.einsum("ij,ij->i", do, do)
    if np.any(r2_new == 0.0):
        raise CollisionError("proposed position coincides with another particle")
    if np.any(r2_old == 0.0):
        raise CollisionError("coincident particles in configuration")
    d = p.dim
    if d == 2:
        dg = -0.5 * (np.sum(np.log(r2_new)) - np.sum(np.log(r2_old)))
    else:
        q = (2.0 - d) / 2.0
        dg = (np.sum(r2_new**q) - np.sum(r2_old**q)) / (d - 2)
    return dv + float(dg)


def gradient_energy(cfg: Configuration, p: GasParameters) -> np.ndarray:
    """Gradient of the total energy, component i = n*grad V(x_i) + sum_{j != i} grad g(x_i - x_j)."""
    pts = cfg.points
    n, d = pts.shape
    grad = np.empty_like(pts)
    for i in range(n):
        grad[i] = p.n * p.potential.grad(pts[i])
    if n >= 2:
        diff = pts[:, None, :] - pts[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        np.fill_diagonal(r2, 1.0)
        off = ~np.eye(n, dtype=bool)
        if np.any(r2[off] == 0.0):
            raise CollisionError("coincident particles in configuration")
        w = r2 ** (-d / 2.0)
        np.fill_diagonal(w, 0.0)
        grad -= np.einsum("ij,ijk->ik", w, diff)
    return grad
