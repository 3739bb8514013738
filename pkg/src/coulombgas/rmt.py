"""Matrix models whose spectra realize exactly solvable planar gases.

Samplers for the Gaussian (Ginibre) matrix, the Haar unitary group, and the
derived ensembles: scaled Ginibre spectra (circular law), ratios of two
Gaussian matrices (spherical ensemble, uniform on the sphere after inverse
stereographic projection), truncations of Haar unitaries, and products of
Gaussian matrices. Spectra are extracted with the in-package QR eigensolver
and validated against the matrix trace at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eig import eig_qr

__all__ = [
    "SpectrumSample",
    "sample_ginibre_matrix",
    "sample_haar_unitary",
    "eigenvalues",
    "ginibre_eigs",
    "spherical_eigs",
    "truncated_unitary_eigs",
    "product_ginibre_eigs",
    "stereographic_lift",
]

_TRACE_RTOL = 1e-8


@dataclass(frozen=True)
class SpectrumSample:
    """Eigenvalues of one sampled matrix, with the scaling that was applied.

    The entries carry multiset semantics: no ordering is meaningful.
    """

    eigenvalues: np.ndarray
    scaling: float = 1.0

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def scaled(self, factor: float) -> "SpectrumSample":
        return SpectrumSample(self.eigenvalues * factor, self.scaling * factor)


def sample_ginibre_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix with i.i.d. complex Gaussian entries, E|M_ij|^2 = 1.

    Real and imaginary parts are independent N(0, 1/2).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    scale = math.sqrt(0.5)
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def sample_haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed m x m unitary matrix.

    Orthonormalize a Gaussian matrix and fix the column phases with the unit
    phases of the triangular factor's diagonal; without the phase correction
    the QR output is not Haar distributed.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    g = sample_ginibre_matrix(m, rng)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases[None, :]


def eigenvalues(matrix: np.ndarray) -> SpectrumSample:
    """Full spectrum of a square matrix (QR solver), trace-checked.

    Raises if the eigenvalue sum disagrees with the trace beyond
    1e-8 * (1 + |trace|), which would indicate an eigensolver failure.
    """
    matrix = np.asarray(matrix)
    eigs = eig_qr(matrix)
    trace = complex(np.trace(matrix))
    if abs(np.sum(eigs) - trace) > _TRACE_RTOL * (1.0 + abs(trace)):
        raise ArithmeticError("eigenvalue sum disagrees with the matrix trace")
    return SpectrumSample(eigs, 1.0)


def ginibre_eigs(n: int, rng: np.random.Generator) -> SpectrumSample:
    """Spectrum of a Gaussian matrix scaled by 1/sqrt(n); the scaled points
    follow the quadratically confined planar gas at beta = 2."""
    m = sample_ginibre_matrix(n, rng)
    return eigenvalues(m).scaled(1.0 / math.sqrt(n))


def spherical_eigs(n: int, rng: np.random.Generator) -> SpectrumSample:
    """Spectrum of M1 @ inv(M2) for independent Gaussian matrices.

    The inverse is applied as a partial-pivot linear solve, never formed
    explicitly. A singular M2 (a probability-zero event) triggers a fresh
    draw.
    """
    for _ in range(10):
        m1 = sample_ginibre_matrix(n, rng)
        m2 = sample_ginibre_matrix(n, rng)
        try:
            # A = M1 M2^{-1}  <=>  A M2 = M1  <=>  M2^T A^T = M1^T
            a = np.linalg.solve(m2.T, m1.T).T
        except np.linalg.LinAlgError:
            continue
        return eigenvalues(a)
    raise np.linalg.LinAlgError("repeated singular draws; generator is suspect")


def truncated_unitary_eigs(n: int, m: int, rng: np.random.Generator) -> SpectrumSample:
    """Spectrum of the top-left n x n block of a Haar m x m unitary (n < m)."""
    if not 1 <= n < m:
        raise ValueError(f"need 1 <= n < m, got n={n}, m={m}")
    u = sample_haar_unitary(m, rng)
    return eigenvalues(u[:n, :n])


def product_ginibre_eigs(n: int, m: int, rng: np.random.Generator) -> SpectrumSample:
    """Spectrum of the scaled product n^{-m/2} M1 ... Mm of independent
    Gaussian matrices; each factor is scaled by 1/sqrt(n) to keep entries
    of order one."""
    if m < 1:
        raise ValueError("need m >= 1 factors")
    scale = 1.0 / math.sqrt(n)
    prod = scale * sample_ginibre_matrix(n, rng)
    for _ in range(m - 1):
        prod = prod @ (scale * sample_ginibre_matrix(n, rng))
    return eigenvalues(prod)


def stereographic_lift(z: complex) -> tuple[float, float, float]:
    """Inverse stereographic projection of z onto the unit sphere:
    (2 Re z, 2 Im z, |z|^2 - 1) / (|z|^2 + 1)."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    r2 = abs(z) ** 2
    denom = r2 + 1.0
    return 2.0 * z.real / denom, 2.0 * z.imag / denom, (r2 - 1.0) / denom
