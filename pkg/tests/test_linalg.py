import numpy as np
import pytest

from chirpramsey.linalg import (expm_hermitian, is_hermitian, is_unitary, kron,
                                op_on, spin_operators)


def taylor_expm(h, t):
    # scaling-and-squaring Taylor oracle, independent of scipy
    a = -1j * t * h
    n = max(int(np.ceil(np.log2(max(np.linalg.norm(a), 1.0)))) + 6, 6)
    a = a / (1 << n)
    out = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, 24):
        term = term @ a / k
        out = out + term
    for _ in range(n):
        out = out @ out
    return out


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


def test_spin_half_algebra():
    sx, sy, sz = spin_operators(0.5)
    np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-15)
    np.testing.assert_allclose(sx @ sx + sy @ sy + sz @ sz,
                               0.75 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(sz, np.diag([0.5, -0.5]), atol=0)


def test_spin_one_algebra():
    sx, sy, sz = spin_operators(1.0)
    np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-15)
    np.testing.assert_allclose(sy @ sz - sz @ sy, 1j * sx, atol=1e-15)
    np.testing.assert_allclose(sx @ sx + sy @ sy + sz @ sz,
                               2.0 * np.eye(3), atol=1e-14)
    # basis ordered by descending m: +1, 0, -1
    np.testing.assert_allclose(sz, np.diag([1.0, 0.0, -1.0]), atol=0)
    assert abs(sx[0, 1] - 1 / np.sqrt(2)) < 1e-15


def test_spin_operators_reject_others():
    for bad in (0.0, 1.5, 2.0, -0.5):
        with pytest.raises(ValueError):
            spin_operators(bad)


def test_kron_matches_numpy_chain():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3))
    c = rng.standard_normal((2, 2))
    np.testing.assert_allclose(kron(a, b, c), np.kron(np.kron(a, b), c))


def test_kron_mixed_product_identity():
    # (A kron B)(C kron D) = AC kron BD
    rng = np.random.default_rng(8)
    a, c = rng.standard_normal((2, 2, 2))
    b, d = rng.standard_normal((2, 3, 3))
    lhs = kron(a, b) @ kron(c, d)
    np.testing.assert_allclose(lhs, kron(a @ c, b @ d), atol=1e-12)


def test_op_on_places_factor():
    sx, _, sz = spin_operators(0.5)
    dims = (3, 2, 2)
    full = op_on(sz, 1, dims)
    expect = kron(np.eye(3), sz, np.eye(2))
    np.testing.assert_allclose(full, expect, atol=0)
    np.testing.assert_allclose(op_on(sx, 2, dims),
                               kron(np.eye(3), np.eye(2), sx), atol=0)


def test_hermitian_and_unitary_checks():
    rng = np.random.default_rng(9)
    h = random_hermitian(rng, 4)
    assert is_hermitian(h)
    assert not is_hermitian(h + 1e-6 * 1j * np.eye(4))
    u = np.linalg.qr(rng.standard_normal((4, 4))
                     + 1j * rng.standard_normal((4, 4)))[0]
    assert is_unitary(u)
    assert not is_unitary(1.001 * u)


def test_expm_hermitian_matches_taylor_oracle():
    rng = np.random.default_rng(10)
    for dim in (2, 3, 6):
        h = random_hermitian(rng, dim)
        for t in (0.3, 1.7):
            u = expm_hermitian(h, t)
            np.testing.assert_allclose(u, taylor_expm(h, t), atol=1e-9)
            assert is_unitary(u)


def test_expm_hermitian_semigroup():
    rng = np.random.default_rng(11)
    h = random_hermitian(rng, 3)
    u1 = expm_hermitian(h, 0.4)
    u2 = expm_hermitian(h, 1.1)
    np.testing.assert_allclose(u1 @ u2, expm_hermitian(h, 1.5), atol=1e-12)
    np.testing.assert_allclose(expm_hermitian(h, 0.0), np.eye(3), atol=1e-14)


def test_expm_hermitian_rejects_bad_input():
    with pytest.raises(ValueError):
        expm_hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        expm_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        expm_hermitian(np.eye(2), float("nan"))


def test_expm_hermitian_diagonal_closed_form():
    e = np.array([1.0, -2.0, 0.25])
    u = expm_hermitian(np.diag(e), 2.0)
    np.testing.assert_allclose(u, np.diag(np.exp(-1j * 2.0 * e)), atol=1e-14)
