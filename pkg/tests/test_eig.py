import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from coulombgas.eig import MAX_EIG_SIZE, ConvergenceError, eig_qr


def random_unitary(n, rng):
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def match_error(expected, computed):
    cost = np.abs(np.asarray(expected)[:, None] - np.asarray(computed)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols].max()


def test_identity():
    eigs = eig_qr(np.eye(4))
    assert match_error(np.ones(4), eigs) < 1e-14


def test_rotation_2x2():
    eigs = eig_qr(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert match_error([1j, -1j], eigs) < 1e-14


def test_known_diagonal_conjugated():
    rng = np.random.default_rng(0)
    target = np.array([1.0, 2.0j, -3.0])
    u = random_unitary(3, rng)
    a = u @ np.diag(target) @ u.conj().T
    assert match_error(target, eig_qr(a)) < 1e-8


def test_upper_triangular_spectrum_is_diagonal():
    rng = np.random.default_rng(1)
    t = np.triu(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    assert match_error(np.diagonal(t), eig_qr(t)) < 1e-10


@pytest.mark.parametrize("n", [2, 5, 16, 40])
def test_constructed_spectra_battery(n):
    rng = np.random.default_rng(n)
    for _ in range(25):
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u = random_unitary(n, rng)
        a = u @ np.diag(d) @ u.conj().T
        assert match_error(d, eig_qr(a)) < 1e-8


def test_trace_and_determinant_identities():
    rng = np.random.default_rng(2)
    for n in (3, 8, 20):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        eigs = eig_qr(a)
        assert np.sum(eigs) == pytest.approx(np.trace(a), rel=1e-8, abs=1e-8)
        assert np.prod(eigs) == pytest.approx(np.linalg.det(a), rel=1e-8)


def test_agreement_with_lapack():
    rng = np.random.default_rng(3)
    for n in (5, 12, 33):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert match_error(np.linalg.eigvals(a), eig_qr(a)) < 1e-8


def test_defective_matrix_jordan_block():
    # a 4x4 Jordan block: all eigenvalues 2, maximally non-diagonalizable;
    # accuracy degrades like eps^(1/4) for defective spectra, so the check
    # is loose by design
    a = np.diag(np.full(4, 2.0)) + np.diag(np.ones(3), k=1)
    assert match_error(np.full(4, 2.0), eig_qr(a)) < 1e-3


def test_real_matrix_complex_pairs():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((12, 12))
    eigs = eig_qr(a)
    assert match_error(np.linalg.eigvals(a), eigs) < 1e-8


def test_rejects_nonsquare_and_oversize_and_nonfinite():
    with pytest.raises(ValueError):
        eig_qr(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eig_qr(np.zeros((MAX_EIG_SIZE + 1, MAX_EIG_SIZE + 1)))
    bad = np.eye(3)
    bad[1, 1] = np.nan
    with pytest.raises(ValueError):
        eig_qr(bad)


def test_sweep_budget_exhaustion_raises(monkeypatch):
    import coulombgas.eig as eigmod

    monkeypatch.setattr(eigmod, "_SWEEPS_PER_EIGENVALUE", 0)
    rng = np.random.default_rng(5)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    with pytest.raises(ConvergenceError):
        eig_qr(a)


def test_trivial_sizes():
    assert eig_qr(np.array([[5.0 + 1.0j]]))[0] == pytest.approx(5.0 + 1.0j)
    assert eig_qr(np.zeros((2, 2))) == pytest.approx([0.0, 0.0])
