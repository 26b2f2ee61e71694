import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matperturb.core import PreconditionError
from matperturb.loewner import (
    divided_difference,
    power_dd_one,
    sqrt_divided_difference,
    xi_sigma_alpha,
    xi_sigma_plus,
)

THIRD = 1 / 3


def test_divided_difference_sqrt():
    dd = divided_difference(np.sqrt, lambda t: 0.5 / np.sqrt(t), [4.0, 1.0])
    np.testing.assert_allclose(dd.entries, [[0.25, THIRD], [THIRD, 0.5]], rtol=1e-15)
    assert dd.kind == "general_f"


def test_divided_difference_identity_and_square():
    np.testing.assert_array_equal(
        divided_difference(lambda t: t, np.ones_like, [3.0, 1.0, -2.0]).entries, np.ones((3, 3))
    )
    a, b = 1.7, -0.4
    dd = divided_difference(lambda t: t**2, lambda t: 2 * t, [a, b]).entries
    np.testing.assert_allclose(dd, [[2 * a, a + b], [a + b, 2 * b]], rtol=1e-15)


def test_divided_difference_rejects_infinite_derivative():
    with pytest.raises(PreconditionError):
        divided_difference(np.sqrt, lambda t: 0.5 / np.sqrt(t), [1.0, 0.0, 0.0])


def test_sqrt_closed_form():
    np.testing.assert_allclose(sqrt_divided_difference([4.0, 1.0]).entries, [[0.25, THIRD], [THIRD, 0.5]])
    np.testing.assert_array_equal(sqrt_divided_difference([1.0, 1.0]).entries, 0.5)
    with pytest.raises(PreconditionError, match="power_dd_one"):
        sqrt_divided_difference([1.0, 0.0, 0.0])


def test_sqrt_closed_form_vs_quotient_near_zero():
    alpha = np.array([1e-16, 1.0])
    closed = sqrt_divided_difference(alpha).entries[0, 1]
    quotient = (np.sqrt(alpha[0]) - 1.0) / (alpha[0] - 1.0)
    assert abs(quotient - closed) <= 1e-8 * closed


def test_power_dd_one_cases():
    np.testing.assert_allclose(power_dd_one(0.5, [1.0, 0.0]).entries, [[0.5, 1], [1, 1]])
    np.testing.assert_array_equal(power_dd_one(0.5, [0.0, 0.0]).entries, 1.0)
    np.testing.assert_allclose(power_dd_one(2.0, [3.0, 1.0]).entries, [[6, 4], [4, 2]])
    with pytest.raises(PreconditionError):
        power_dd_one(0.0, [1.0])


def test_xi_sigma_plus():
    np.testing.assert_allclose(xi_sigma_plus([2.0, 1.0]).entries, [[0.25, THIRD], [THIRD, 0.5]])
    np.testing.assert_array_equal(xi_sigma_plus([1.0]).entries, [[0.5]])
    np.testing.assert_allclose(xi_sigma_plus([0.3, 0.3]).entries, 1 / 0.6)
    with pytest.raises(PreconditionError):
        xi_sigma_plus([1.0, 0.0])


def test_xi_sigma_alpha():
    np.testing.assert_allclose(xi_sigma_alpha([2.0, -1.0], [2.0, 1.0]).entries, [[1, THIRD], [THIRD, -1]])
    np.testing.assert_array_equal(xi_sigma_alpha([3.0, 0.2, 1.0], [3.0, 0.2, 1.0]).entries, 1.0)
    np.testing.assert_array_equal(xi_sigma_alpha([1.0, -1.0], [1.0, 1.0]).entries, [[1, 0], [0, -1]])
    with pytest.raises(PreconditionError):
        xi_sigma_alpha([1.0, 0.0], [1.0, 0.0])


# rounding makes pairs either identical or at least 1e-3 apart, where the raw
# difference quotient keeps about 12 significant digits
nonneg = st.lists(st.floats(0.0, 10.0).map(lambda x: round(x, 3)), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(nonneg, st.sampled_from([0.25, 1 / 3, 0.5, 2 / 3, 1.5, 2.0, 3.0]))
def test_power_dd_one_matches_general(alpha, s):
    alpha = np.array(alpha)
    one = power_dd_one(s, alpha).entries
    positive = alpha > 1e-9
    if positive.sum() == 0:
        return
    a = alpha[positive]
    gen = divided_difference(lambda t: t**s, lambda t: s * t ** (s - 1), a).entries
    sub = one[np.ix_(positive, positive)]
    np.testing.assert_allclose(sub, gen, rtol=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-3, 10.0).map(lambda x: round(x, 3)), min_size=1, max_size=8))
def test_sqrt_closed_form_matches_quotient(alpha):
    alpha = np.array(alpha)
    closed = sqrt_divided_difference(alpha).entries
    gen = divided_difference(np.sqrt, lambda t: 0.5 / np.sqrt(t), alpha).entries
    np.testing.assert_allclose(gen, closed, rtol=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10.0, 10.0).filter(lambda x: abs(x) > 1e-6), min_size=1, max_size=8))
def test_xi_sigma_alpha_bounded_and_all_symmetric(alpha):
    alpha = np.array(alpha)
    sigma = np.abs(alpha)
    for dd in (
        xi_sigma_alpha(alpha, sigma),
        xi_sigma_plus(sigma),
        power_dd_one(0.5, sigma),
        divided_difference(np.sin, np.cos, alpha),
    ):
        assert np.array_equal(dd.entries, dd.entries.T)
        assert np.all(np.isfinite(dd.entries))
    assert np.all(np.abs(xi_sigma_alpha(alpha, sigma).entries) <= 1.0)
