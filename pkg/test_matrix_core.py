"""Tests for dense matrix arithmetic, eigendecomposition and the Löwner order"""
import numpy as np
import pytest

from linalg import (add, adjoint, as_matrix, direct_sum_embed, freeze, herm_eigen, is_psd,
                    loewner_leq, max_norm, multiply, scale, tensor, trace)
from utils.errors import DimensionMismatch, InvalidMatrix, NotHermitian, NotSquare


def _random_matrix(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def _random_psd(rng, d):
    g = _random_matrix(rng, d)
    return g @ g.conj().T


def test_as_matrix_rejects_bad_input():
    with pytest.raises(InvalidMatrix):
        as_matrix([1, 2, 3])
    with pytest.raises(InvalidMatrix):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(InvalidMatrix):
        as_matrix([["a"]])


def test_matrices_are_read_only():
    m = as_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        m[0, 0] = 5
    f = freeze(np.eye(2))
    assert f.flags.writeable is False
    with pytest.raises(ValueError):
        f[1, 1] = 0


def test_adjoint(I2, Y):
    assert np.array_equal(adjoint(I2), I2)
    assert np.array_equal(adjoint(Y), Y)
    assert np.array_equal(adjoint(np.array([[0, 1], [0, 0]], dtype=complex)),
                          np.array([[0, 0], [1, 0]], dtype=complex))


def test_adjoint_is_an_involution(rng):
    a = _random_matrix(rng, 5)
    assert np.array_equal(adjoint(adjoint(a)), a)


def test_multiply(I2, X, H, P0, P1):
    assert np.allclose(multiply(X, X), I2)
    assert np.allclose(multiply(H, H), I2)
    assert np.allclose(multiply(P0, P1), np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        multiply(np.ones((2, 3)), np.ones((2, 3)))


def test_add_and_scale(I2, P0, P1, rng):
    a = _random_matrix(rng, 3)
    assert np.array_equal(add(a, np.zeros((3, 3))), a)
    assert np.array_equal(scale(1, a), a)
    assert np.array_equal(add(P0, P1), I2)
    with pytest.raises(DimensionMismatch):
        add(I2, np.eye(3))


def test_trace(I2, Z, P0, PLUS):
    assert trace(I2) == 2
    assert trace(Z) == 0
    assert trace(multiply(P0, PLUS)) == pytest.approx(0.5)
    with pytest.raises(NotSquare):
        trace(np.ones((2, 3)))


def test_trace_cyclicity(rng):
    for d in range(1, 9):
        a, b, c = (_random_matrix(rng, d) for _ in range(3))
        lhs = trace(a @ b @ c)
        rhs = trace(c @ a @ b)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_tensor(I2, Z):
    assert np.array_equal(tensor(I2, I2), np.eye(4))
    assert np.array_equal(tensor(Z, Z), np.diag([1, -1, -1, 1]).astype(complex))


def test_tensor_mixed_product_and_associativity(rng):
    a, b, c, d = (_random_matrix(rng, 2) for _ in range(4))
    assert max_norm(tensor(a, b) @ tensor(c, d) - tensor(a @ c, b @ d)) <= 1e-12
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


def test_direct_sum_embed(I2, rng):
    m = _random_matrix(rng, 3)
    assert np.array_equal(direct_sum_embed([m]), m)
    assert np.array_equal(direct_sum_embed([np.array([[2]]), np.array([[3]])]), np.diag([2, 3]))
    assert np.array_equal(direct_sum_embed([I2, np.zeros((2, 2))]), np.diag([1, 1, 0, 0]))
    with pytest.raises(NotSquare):
        direct_sum_embed([np.ones((1, 2))])


@pytest.mark.parametrize("name,expected", [
    ("Z", [-1, 1]),
    ("H", [-1, 1]),
])
def test_herm_eigen_known_spectra(name, expected, request):
    result = herm_eigen(request.getfixturevalue(name))
    assert np.allclose(result.eigenvalues, expected)


def test_herm_eigen_identity():
    assert np.allclose(herm_eigen(np.eye(4)).eigenvalues, [1, 1, 1, 1])


def test_herm_eigen_invariants(rng):
    for d in (1, 3, 8):
        g = _random_matrix(rng, d)
        a = g + g.conj().T
        w, v = herm_eigen(a)
        assert np.all(np.diff(w) >= 0)
        norm = np.linalg.norm(a, 2)
        for k in range(d):
            assert np.linalg.norm(a @ v[:, k] - w[k] * v[:, k]) <= 1e-9 * (1 + norm)
        assert max_norm(v.conj().T @ v - np.eye(d)) <= 1e-9
        assert max_norm(v @ np.diag(w) @ v.conj().T - a) <= 1e-9 * (1 + max_norm(a))


def test_herm_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eigen(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NotSquare):
        herm_eigen(np.ones((2, 3)))


def test_is_psd(P0, Z, PLUS, I2):
    assert is_psd(P0)
    assert not is_psd(Z)
    assert not is_psd(PLUS - 0.5 * I2)
    with pytest.raises(NotHermitian):
        is_psd(np.array([[0, 1], [0, 0]], dtype=complex))


def test_loewner_leq_examples(I2, X, P0, PLUS):
    assert loewner_leq(np.zeros((2, 2)), I2)
    assert loewner_leq(X, I2)
    assert not loewner_leq(P0, PLUS)
    assert not loewner_leq(PLUS, P0)
    with pytest.raises(DimensionMismatch):
        loewner_leq(I2, np.eye(3))


def test_loewner_order_axioms(rng):
    for _ in range(20):
        m = _random_psd(rng, 4)
        n = m + _random_psd(rng, 4)
        p = n + _random_psd(rng, 4)
        assert loewner_leq(m, m, tol=1e-9)
        assert loewner_leq(m, n, tol=1e-9) and loewner_leq(n, p, tol=1e-9)
        assert loewner_leq(m, p, tol=1e-9)
        if loewner_leq(m, n, tol=1e-9) and loewner_leq(n, m, tol=1e-9):
            assert max_norm(m - n) <= 1e-8
    m = _random_psd(rng, 3)
    assert loewner_leq(m, m.copy()) and loewner_leq(m.copy(), m)
