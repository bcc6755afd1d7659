import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from oracles import scipy_betabin_matrix
from triadic.model import (BETABIN, SGS, betabin_dalpha_matrix, betabin_logpmf, betabin_matrix,
                           betabin_pmf, bin_distribution, bin_model, bin_ranges, build_model,
                           n_bins, sgs_bji, sgs_matrix)

probs = st.floats(0.01, 0.99)
alphas = st.floats(0.0, 5.0)


def test_alpha_zero_is_binomial():
    for i in range(0, 65, 7):
        for j in range(i + 1):
            assert betabin_pmf(j, i, 0.3, 0.0) == pytest.approx(stats.binom.pmf(j, i, 0.3), abs=1e-12)


@given(p=probs, alpha=st.floats(0.01, 5.0), W=st.integers(1, 40))
def test_matrix_matches_scipy_betabinom(p, alpha, W):
    np.testing.assert_allclose(betabin_matrix(p, alpha, W), scipy_betabin_matrix(p, alpha, W),
                               atol=1e-10)


@given(p=probs, alpha=alphas, W=st.integers(1, 64), binned=st.booleans())
def test_columns_sum_to_one(p, alpha, W, binned):
    m = build_model(BETABIN, W, p_tri=p, alpha=alpha, binned=binned)
    np.testing.assert_allclose(m.matrix.sum(axis=0), 1.0, atol=1e-10)


@given(p=st.floats(0.001, 1.0), W=st.integers(1, 64), binned=st.booleans())
def test_sgs_columns_sum_to_one(p, W, binned):
    m = build_model(SGS, W, p_n=p, binned=binned)
    np.testing.assert_allclose(m.matrix.sum(axis=0), 1.0, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0])
def test_betabin_mean(alpha):
    B = betabin_matrix(0.37, alpha, 64)
    means = np.arange(65) @ B
    np.testing.assert_allclose(means, 0.37 * np.arange(65), atol=1e-8)


def test_betabin_overdispersed_variance():
    i, p, alpha = 20, 0.3, 0.5
    col = betabin_matrix(p, alpha, i)[:, i]
    j = np.arange(i + 1)
    var = col @ j ** 2 - (col @ j) ** 2
    expected = i * p * (1 - p) * (1 + (i - 1) * alpha / (1 + alpha))
    assert var == pytest.approx(expected, rel=1e-9)


def test_logpmf_consistent():
    for j in range(11):
        assert np.exp(betabin_logpmf(j, 10, 0.4, 0.2)) == pytest.approx(betabin_pmf(j, 10, 0.4, 0.2))


@given(p=st.floats(0.05, 0.95), alpha=st.floats(0.01, 3.0))
def test_dalpha_matches_finite_difference(p, alpha):
    h = 1e-6 * max(alpha, 1e-3)
    fd = (betabin_matrix(p, alpha + h, 15) - betabin_matrix(p, alpha - h, 15)) / (2 * h)
    np.testing.assert_allclose(betabin_dalpha_matrix(p, alpha, 15), fd, atol=1e-6)


def test_sgs_piecewise():
    assert sgs_bji(0, 0, 0.2) == 1.0
    assert sgs_bji(0, 5, 0.2) == pytest.approx(0.8)
    assert sgs_bji(5, 5, 0.2) == pytest.approx(0.2)
    assert sgs_bji(3, 5, 0.2) == 0.0
    B = sgs_matrix(0.2, 5)
    assert B[0, 0] == 1.0 and B[2, 2] == pytest.approx(0.2)
    with pytest.raises(ValueError):
        sgs_bji(6, 5, 0.2)


def test_bins():
    assert n_bins(64) == 6
    assert n_bins(20) == 4
    assert bin_ranges(20) == [(0, 0), (1, 1), (2, 3), (4, 7), (8, 15), (16, 20)]
    theta = np.full(21, 1 / 21)
    b = bin_distribution(theta)
    assert b.sum() == pytest.approx(1.0)
    assert b[-1] == pytest.approx(5 / 21)


def test_binned_model_shape_and_labels():
    m = bin_model(build_model(BETABIN, 64, p_tri=0.2, alpha=0.1))
    assert m.matrix.shape == (65, 8)
    assert m.labels == list(range(-1, 7))
    with pytest.raises(ValueError):
        bin_model(m, K=3)


def test_q_and_conditioned_model():
    m = build_model(BETABIN, 10, p_tri=0.5, alpha=0.0)
    np.testing.assert_allclose(m.q, 0.5 ** np.arange(1, 11))
    A = m.a_matrix()
    np.testing.assert_allclose(A.sum(axis=0), 1.0, atol=1e-12)


def test_model_validation():
    with pytest.raises(ValueError):
        build_model("nope", 5)
    with pytest.raises(ValueError):
        build_model(BETABIN, 0)
    with pytest.raises(ValueError):
        build_model(BETABIN, 5, p_tri=1.5)
    with pytest.raises(ValueError):
        build_model(BETABIN, 5, alpha=-1)


def test_p_one_is_identity():
    m = build_model(BETABIN, 12, p_tri=1.0, alpha=0.3)
    np.testing.assert_array_equal(m.matrix, np.eye(13))
