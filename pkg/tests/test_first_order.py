import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_complex, rand_hermitian, rand_psd, rand_unitary
from matperturb.core import NotPSDError, PreconditionError, eigh, matrix_modulus, matrix_power
from matperturb.decomposition import ModulusSplit, SchurSplit, modulus_split, schur_reassemble
from matperturb.first_order import (
    KernelPresentError,
    dk_approx,
    modulus_approx,
    modulus_approx_invertible,
    modulus_approx_psd,
    modulus_term,
    power_approx,
    power_approx_s,
    power_function,
)

SQRT = power_function(0.5)


def nonsingular_psd(rng, n):
    U = rand_unitary(rng, n)
    return (U * rng.uniform(0.5, 2.0, n)) @ U.conj().T


# dk_approx


def test_dk_sqrt_offdiagonal():
    E = np.array([[0, 0.03], [0.03, 0]])
    out = dk_approx(eigh(np.diag([4.0, 1.0])), E, *SQRT)
    np.testing.assert_allclose(out, [[2, 0.01], [0.01, 1]], atol=1e-15)


def test_dk_zero_perturbation(rng):
    A = nonsingular_psd(rng, 4)
    np.testing.assert_allclose(dk_approx(eigh(A), np.zeros((4, 4)), *SQRT), matrix_power(A, 0.5), atol=1e-14)


def test_dk_scalar_taylor():
    for eps in (1e-2, 1e-3):
        out = dk_approx(eigh([[1.0]]), [[eps]], *SQRT)[0, 0].real
        assert out == pytest.approx(1 + eps / 2, abs=1e-15)
        # remainder of sqrt(1+eps) is eps^2/8 + O(eps^3)
        assert (1 + eps / 2) - np.sqrt(1 + eps) == pytest.approx(eps**2 / 8, rel=2 * eps)


def test_dk_rejects_kernel_for_sqrt():
    with pytest.raises(KernelPresentError):
        dk_approx(eigh(np.diag([1.0, 0.0])), np.eye(2) * 0.1, *SQRT)


def test_dk_square_allows_kernel():
    A = np.diag([1.0, 0.0])
    E = np.array([[0.0, 0.1], [0.1, 0.2]])
    out = dk_approx(eigh(A), E, lambda t: t**2, lambda t: 2 * t)
    np.testing.assert_allclose(out, A @ A + A @ E + E @ A, atol=1e-15)


def test_dk_term_is_linear(rng):
    A = nonsingular_psd(rng, 5)
    dec = eigh(A)
    base = matrix_power(A, 1 / 3)
    f = power_function(1 / 3)
    L = lambda E: dk_approx(dec, E, *f) - base
    E1, E2 = rand_hermitian(rng, 5), rand_hermitian(rng, 5)
    a, b = 0.7, -1.3
    np.testing.assert_allclose(L(a * E1 + b * E2), a * L(E1) + b * L(E2), atol=1e-12)


# power_approx


def test_power_decoupled_diagonal_exact():
    res = power_approx(eigh(np.diag([1.0, 0.0])), np.diag([0.0, 0.04]), 2)
    np.testing.assert_allclose(res.approximation, np.diag([1, 0.2]), atol=1e-15)
    exact = matrix_power(np.diag([1.0, 0.04]), 0.5)
    assert np.linalg.norm(res.approximation - exact, 2) <= 1e-12


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5])
def test_power_pure_kernel(p):
    e = 0.3
    res = power_approx(eigh([[0.0]]), [[e]], p)
    assert res.approximation[0, 0].real == pytest.approx(e ** (1 / p), rel=1e-14)
    assert res.split.D[0, 0].real == pytest.approx(e)


def test_power_two_by_two_formula():
    t = 0.01
    res = power_approx(eigh(np.diag([1.0, 0.0])), [[0, t], [t, t]], 2)
    expected_term = np.array([[0, t], [t, np.sqrt(t - t**2)]])
    np.testing.assert_allclose(res.first_order_term, expected_term, atol=1e-15)
    np.testing.assert_allclose(
        res.approximation, [[1, 0.01], [0.01, 0.099498743710662]], atol=1e-14
    )
    assert res.expected_order == pytest.approx(1.5)
    np.testing.assert_array_equal(res.approximation, res.base + res.first_order_term)


def test_power_rejects_non_psd_perturbation():
    with pytest.raises(NotPSDError):
        power_approx(eigh(np.diag([1.0, 0.0])), np.diag([0.0, -0.01]), 2)
    with pytest.raises(PreconditionError):
        power_approx(eigh(np.diag([1.0, 0.0])), np.diag([0.0, 0.01]), 1.0)


def test_power_unguaranteed_for_large_p():
    res = power_approx(eigh(np.diag([1.0, 0.0])), np.diag([0.0, 0.01]), 4)
    assert res.expected_order is None
    assert res.approximation[1, 1].real == pytest.approx(0.01**0.25)


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5, 4.0])
def test_power_reduces_to_dk_without_kernel(rng, p):
    A = nonsingular_psd(rng, 5)
    E = rand_hermitian(rng, 5) * 0.05
    dec = eigh(A)
    np.testing.assert_allclose(
        power_approx(dec, E, p).approximation, dk_approx(dec, E, *power_function(1 / p)), atol=1e-12
    )


def _singular_instance(rng, n=6, l=3):
    U = rand_unitary(rng, n)
    alpha = np.concatenate([rng.uniform(0.5, 2.0, l), np.zeros(n - l)])
    return U, alpha, (U * alpha) @ U.conj().T


def test_power_nonlinearity_confined_to_D(rng):
    U, alpha, A = _singular_instance(rng)
    dec = eigh(A)
    l = 3
    B = rand_hermitian(rng, l) * 0.01
    C = rand_complex(rng, l, 3) * 0.01
    G = rand_complex(rng, 3) * 0.1
    D = G @ G.conj().T

    def term(scale):
        # hold D fixed while scaling B and C
        Eh = schur_reassemble(SchurSplit(dec.alpha[:l], scale * B, scale * C, D))
        return power_approx(dec, dec.U @ Eh @ dec.U.conj().T, 2).first_order_term

    t0, t1, t2 = term(0.0), term(1.0), term(2.0)
    np.testing.assert_allclose(t2 - t0, 2 * (t1 - t0), atol=1e-12)


# power_approx_s


def test_power_s_decoupled_diagonal():
    d = 0.05
    res = power_approx_s(eigh(np.diag([1.0, 0.0])), np.diag([0.0, d]), 2)
    np.testing.assert_allclose(res.approximation, np.diag([1, d**2]), atol=1e-15)
    assert res.expected_order == 2


def test_power_s_zero_perturbation(rng):
    U, alpha, A = _singular_instance(rng)
    res = power_approx_s(eigh(A), np.zeros((6, 6)), 1.5)
    np.testing.assert_allclose(res.approximation, matrix_power(A, 1.5), atol=1e-13)


def test_power_s_matches_dk_square_full_rank(rng):
    A = nonsingular_psd(rng, 5)
    E = rand_hermitian(rng, 5) * 0.05
    dec = eigh(A)
    np.testing.assert_allclose(
        power_approx_s(dec, E, 2).approximation, dk_approx(dec, E, lambda t: t**2, lambda t: 2 * t), atol=1e-12
    )


def test_power_s_rejects_small_s():
    with pytest.raises(PreconditionError):
        power_approx_s(eigh(np.eye(2)), np.zeros((2, 2)), 1.0)


# modulus


def test_modulus_zero_base(rng):
    Z = rand_complex(rng, 4)
    res = modulus_approx(np.zeros((4, 4)), Z)
    np.testing.assert_allclose(res.approximation, matrix_modulus(Z), atol=1e-12)


def test_modulus_scalar_block():
    z = 0.3
    res = modulus_approx(np.diag([2.0, 0.0]), [[z, 0], [0, 0]])
    np.testing.assert_allclose(res.first_order_term, np.diag([z, 0]), atol=1e-15)
    np.testing.assert_allclose(res.approximation, np.diag([2 + z, 0]), atol=1e-15)


def test_modulus_ignores_lower_left_block():
    res = modulus_approx(np.diag([2.0, 0.0]), [[0, 0], [1, 0]])
    np.testing.assert_array_equal(res.first_order_term, np.zeros((2, 2)))
    np.testing.assert_allclose(res.approximation, np.diag([2, 0]))


def test_modulus_term_never_reads_Z21(rng):
    dec, split = modulus_split(np.diag([3.0, 1.0, 0.0, 0.0]), rand_complex(rng, 4))
    poisoned = ModulusSplit(split.sigma_plus, split.Z11, split.Z12, np.full((2, 2), np.nan), split.Z22)
    np.testing.assert_array_equal(modulus_term(dec.V, poisoned), modulus_term(dec.V, split))


def test_modulus_psd_examples(rng):
    Z = rand_hermitian(rng, 3)
    np.testing.assert_allclose(modulus_approx_psd(np.zeros((3, 3)), Z).approximation, matrix_modulus(Z), atol=1e-13)
    res = modulus_approx_psd(np.diag([1.0, 0.0]), np.diag([0.0, -0.1]))
    np.testing.assert_allclose(res.approximation, np.diag([1, 0.1]), atol=1e-15)
    with pytest.raises(NotPSDError):
        modulus_approx_psd(np.diag([1.0, -1.0]), Z[:2, :2])


def test_modulus_invertible_examples(rng):
    res = modulus_approx_invertible(np.diag([2.0, -1.0]), np.zeros((2, 2)))
    np.testing.assert_allclose(res.approximation, np.diag([2, 1]), atol=1e-15)
    Z = rand_hermitian(rng, 3) * 1e-3
    np.testing.assert_allclose(modulus_approx_invertible(np.eye(3), Z).approximation, np.eye(3) + Z, atol=1e-15)
    with pytest.raises(PreconditionError):
        modulus_approx_invertible(np.diag([1.0, 0.0]), np.zeros((2, 2)))


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_modulus_psd_agrees_with_general(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    X = rand_psd(rng, n, rank=int(rng.integers(0, n + 1)))
    Z = rand_hermitian(rng, n) * 0.01
    a = modulus_approx_psd(X, Z).approximation
    b = modulus_approx(X, Z).approximation
    assert np.linalg.norm(a - b, 2) <= 1e-12 * (1 + np.linalg.norm(X, 2))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_modulus_invertible_agrees_with_general(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    U = rand_unitary(rng, n)
    alpha = rng.uniform(0.5, 2.0, n) * rng.choice([-1, 1], n)
    X = (U * alpha) @ U.conj().T
    Z = rand_hermitian(rng, n) * 0.01
    a = modulus_approx_invertible(X, Z).approximation
    b = modulus_approx(X, Z).approximation
    assert np.linalg.norm(a - b, 2) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_outputs_hermitian(seed):
    rng = np.random.default_rng(seed)
    U, alpha, A = _singular_instance(rng, 5, 2)
    dec = eigh(A)
    B = rand_hermitian(rng, 2) * 0.05
    C = rand_complex(rng, 2, 3) * 0.05
    G = rand_complex(rng, 3) * 0.2
    Eh = schur_reassemble(SchurSplit(dec.alpha[:2], B, C, G @ G.conj().T))
    E = dec.U @ Eh @ dec.U.conj().T
    X = rand_complex(rng, 5, 2) @ rand_complex(rng, 2, 5)
    outs = [
        power_approx(dec, E, 2).approximation,
        power_approx_s(dec, E, 1.5).approximation,
        modulus_approx(X, rand_complex(rng, 5) * 0.1).approximation,
        modulus_approx_psd(A, rand_hermitian(rng, 5) * 0.1).approximation,
    ]
    for M in outs:
        assert np.abs(M - M.conj().T).max() <= 1e-12
