"""Dense complex eigensolver: Householder Hessenberg reduction followed by
single-shift QR iteration with deflation.

Desk-scale scope (n <= 256), eigenvalues only. The active trailing block is
shrunk whenever a subdiagonal entry h_{k+1,k} falls below
1e-13 * (|h_{k,k}| + |h_{k+1,k+1}|); blocks of size two are resolved with a
stable quadratic formula. A Wilkinson shift (the eigenvalue of the trailing
2x2 closest to the corner entry) drives convergence, with an exceptional
shift thrown in every tenth stalled sweep. The iteration budget is 40 n QR
sweeps; exhausting it raises instead of returning silently wrong values.

No balancing pass is performed: the sampled test matrices are well scaled
at these sizes.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = ["ConvergenceError", "eig_qr", "MAX_EIG_SIZE"]

MAX_EIG_SIZE = 256
_DEFLATION_TOL = 1e-13
_SWEEPS_PER_EIGENVALUE = 40


class ConvergenceError(RuntimeError):
    """QR iteration exhausted its sweep budget without full deflation."""


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Reduce to upper Hessenberg form by complex Householder similarity."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        # similarity H <- P H P with P = I - 2 v v*
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h


def _eig_2x2(a: complex, b: complex, c: complex, d: complex) -> tuple[complex, complex]:
    """Eigenvalues of [[a, b], [c, d]] by the stable quadratic formula."""
    half_tr = 0.5 * (a + d)
    det = a * d - b * c
    disc = cmath.sqrt(half_tr * half_tr - det)
    l1 = half_tr + disc
    l2 = half_tr - disc
    # take the larger root first, derive the other from the determinant
    if abs(l1) >= abs(l2):
        big = l1
    else:
        big = l2
    if big != 0.0:
        small = det / big
    else:
        small = 0.0
    return big, small


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    """Eigenvalue of the trailing 2x2 block closest to h[hi, hi]."""
    a = h[hi - 1, hi - 1]
    b = h[hi - 1, hi]
    c = h[hi, hi - 1]
    d = h[hi, hi]
    delta = 0.5 * (a - d)
    bc = b * c
    root = cmath.sqrt(delta * delta + bc)
    denom_plus = delta + root
    denom_minus = delta - root
    denom = denom_plus if abs(denom_plus) >= abs(denom_minus) else denom_minus
    if denom == 0.0:
        return d
    return d - bc / denom


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """Rotation (c real, s) with [c, s; -conj(s), c] @ [a, b]^T = [r, 0]^T."""
    if b == 0.0:
        return 1.0, 0.0 + 0.0j
    if a == 0.0:
        return 0.0, b.conjugate() / abs(b)
    r = math.hypot(abs(a), abs(b))
    c = abs(a) / r
    s = (a / abs(a)) * b.conjugate() / r
    return c, s


def _qr_sweep(block: np.ndarray, shift: complex) -> None:
    """One explicit shifted QR similarity step on a Hessenberg block, in place."""
    m = block.shape[0]
    idx = np.arange(m)
    block[idx, idx] -= shift
    rotations = []
    for k in range(m - 1):
        c, s = _givens(block[k, k], block[k + 1, k])
        rotations.append((c, s))
        rk = block[k, k:].copy()
        rk1 = block[k + 1, k:]
        block[k, k:] = c * rk + s * rk1
        block[k + 1, k:] = -np.conj(s) * rk + c * rk1
        block[k + 1, k] = 0.0
    for k, (c, s) in enumerate(rotations):
        rows = slice(0, min(k + 2, m))
        ck = block[rows, k].copy()
        ck1 = block[rows, k + 1]
        block[rows, k] = c * ck + np.conj(s) * ck1
        block[rows, k + 1] = -s * ck + c * ck1
    block[idx, idx] += shift


def eig_qr(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square complex matrix (unordered).

    Raises ConvergenceError if deflation is not complete within 40 n QR
    sweeps, and ValueError beyond the n <= 256 desk-scale bound.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n > MAX_EIG_SIZE:
        raise ValueError(f"eigensolver limited to n <= {MAX_EIG_SIZE}, got n={n}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(np.asarray(a, dtype=complex).imag)):
        raise ValueError("matrix entries must be finite")
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([complex(a[0, 0])], dtype=complex)

    h = _hessenberg(a)
    budget = _SWEEPS_PER_EIGENVALUE * n
    sweeps = 0
    stalled = 0
    hi = n - 1
    while hi > 0:
        # deflate negligible subdiagonals at the bottom of the active part
        k = hi
        while k > 0:
            thresh = _DEFLATION_TOL * (abs(h[k - 1, k - 1]) + abs(h[k, k]))
            if abs(h[k, k - 1]) <= thresh:
                h[k, k - 1] = 0.0
                break
            k -= 1
        if k == hi:
            hi -= 1
            stalled = 0
            continue
        lo = k  # h[lo, lo-1] is (or was just set) negligible, or lo == 0
        if hi - lo == 1:
            l1, l2 = _eig_2x2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            h[lo, lo] = l1
            h[hi, hi] = l2
            h[hi, lo] = 0.0
            hi -= 2
            stalled = 0
            continue
        sweeps += 1
        stalled += 1
        if sweeps > budget:
            raise ConvergenceError(
                f"QR iteration did not deflate within {budget} sweeps (n={n})"
            )
        if stalled % 10 == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            shift = _wilkinson_shift(h, hi)
        _qr_sweep(h[lo : hi + 1, lo : hi + 1], shift)
    return np.diagonal(h).astype(complex).copy()
