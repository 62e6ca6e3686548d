"""Hermite-ladder recursion and large-momentum expansion checks."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magband import (
    FredholmError,
    InsufficientBasisError,
    ModelError,
    evaluate_expansion,
    expansion_coefficients,
    exponential_gap_check,
    landau_level,
    remainder_rate,
)
from magband.asymptotics import (
    HermiteVector,
    apply_A,
    apply_s,
    basis_vector,
    dot,
    solve_fredholm,
)
from magband.bands import BandCurve

import oracles


# ------------------------------------------------------------- ladder algebra

def test_apply_s_matches_quadrature_elements():
    size = 10
    for j in range(1, 7):
        image = apply_s(basis_vector(j, size))
        for i in range(1, size + 1):
            expected = oracles.ladder_matrix_element(i, j)
            assert image.coefficients[i - 1] == pytest.approx(expected, abs=1e-12)


def test_apply_s_spill_accounting():
    # pushing mass past the last slot must be tallied, not dropped
    v = basis_vector(6, 6)
    image = apply_s(v)
    assert image.spill == pytest.approx(np.sqrt(6 / 2.0))
    assert apply_s(basis_vector(1, 6)).spill == 0.0


coeff_arrays = st.lists(
    st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=3, max_size=12
).map(lambda c: HermiteVector(np.array(c)))


@given(coeff_arrays, coeff_arrays)
@settings(max_examples=50)
def test_apply_s_is_symmetric(u, v):
    if u.size != v.size:
        return
    # <u, s v> = <s u, v> whenever no mass is lost off the truncation edge
    su, sv = apply_s(u), apply_s(v)
    if su.spill == 0.0 and sv.spill == 0.0:
        assert dot(u, sv) == pytest.approx(dot(su, v), rel=1e-12, abs=1e-12)


@given(st.integers(min_value=2, max_value=6))
def test_apply_A_matches_dense_power(q):
    size = 14
    s = np.zeros((size, size))
    for idx in range(1, size):
        s[idx - 1, idx] = s[idx, idx - 1] = np.sqrt(idx / 2.0)
    dense = (q - 1) * np.linalg.matrix_power(-s, q - 2)
    for j in (1, 3, 5):
        image = apply_A(q, basis_vector(j, size))
        if image.spill == 0.0:
            assert np.allclose(image.coefficients, dense[:, j - 1], atol=1e-12)


def test_apply_A_first_operator_vanishes():
    v = basis_vector(2, 8)
    image = apply_A(1, v)
    assert np.all(image.coefficients == 0.0)


def test_solve_fredholm_inverts_shifted_operator():
    size, p = 12, 2
    rhs = HermiteVector(np.ones(size))
    rhs.coefficients[p - 1] = 0.0
    g = solve_fredholm(p, rhs)
    levels = 2.0 * np.arange(1, size + 1) - 1.0
    residual = (levels - landau_level(p)) * g.coefficients + rhs.coefficients
    assert np.max(np.abs(residual)) < 1e-12
    assert g.coefficients[p - 1] == 0.0


def test_solve_fredholm_rejects_kernel_component():
    rhs = HermiteVector(np.ones(8))
    with pytest.raises(FredholmError):
        solve_fredholm(3, rhs)


# --------------------------------------------------------- expansion recursion

@pytest.mark.parametrize("p,k", [(1, 0.75), (1, 8.75), (2, 2.0), (3, 15.75)])
def test_expansion_matches_dense_recursion(p, k):
    order = 6
    coeffs = expansion_coefficients(p, k, order, p + 2 * order)
    dense = oracles.dense_alphas(p, k, order, p + 2 * order + 6)
    assert np.allclose(coeffs.alphas, dense, rtol=1e-12, atol=1e-12)


def test_expansion_analytic_leading_orders():
    for p in (1, 2, 4):
        coeffs = expansion_coefficients(p, 3.0, 4, p + 8)
        assert coeffs.alphas[0] == 0.0
        assert coeffs.alphas[1] == pytest.approx(1.0, abs=1e-14)
        assert coeffs.alphas[2] == pytest.approx(0.0, abs=1e-14)
        # alpha_4 = 3 E_p / 2, independent of the coupling
        assert coeffs.alphas[3] == pytest.approx(1.5 * landau_level(p), rel=1e-13)


def test_expansion_modes_banded_and_orthogonal():
    p, order = 2, 5
    coeffs = expansion_coefficients(p, 4.0, order, p + 2 * order)
    g0 = coeffs.modes[0]
    for q, g in enumerate(coeffs.modes):
        support = np.nonzero(g.coefficients)[0] + 1
        assert np.all(np.abs(support - p) <= q)  # ladder bandedness
        if q >= 1:
            assert abs(dot(g, g0)) < 1e-14


def test_expansion_stable_under_basis_doubling():
    a = expansion_coefficients(1, 8.75, 6, 13)
    b = expansion_coefficients(1, 8.75, 6, 26)
    assert np.allclose(a.alphas, b.alphas, rtol=0, atol=1e-12)


def test_expansion_coupling_dependence_enters_late():
    # first four coefficients are coupling-free; the k-linear correctors
    # first feed back into alpha at order 6
    a = expansion_coefficients(1, 1.0, 6, 13)
    b = expansion_coefficients(1, 2.0, 6, 13)
    assert np.allclose(a.alphas[:5], b.alphas[:5], atol=1e-13)
    assert abs(a.alphas[5] - b.alphas[5]) > 1e-3


def test_expansion_rejects_small_basis():
    with pytest.raises(InsufficientBasisError):
        expansion_coefficients(1, 1.0, 4, 8)  # needs >= 9
    expansion_coefficients(1, 1.0, 4, 9)


def test_expansion_order_zero():
    coeffs = expansion_coefficients(2, 5.0, 0, 4)
    assert coeffs.alphas.size == 0
    assert evaluate_expansion(coeffs, 7.0) == landau_level(2)


def test_evaluate_expansion_values():
    coeffs = expansion_coefficients(1, 2.0, 2, 8)
    assert evaluate_expansion(coeffs, 10.0) == pytest.approx(1.0 + 2.0 / 100.0)
    with pytest.raises(ModelError):
        evaluate_expansion(coeffs, 0.0)
    with pytest.raises(ModelError):
        evaluate_expansion(coeffs, -3.0)


# -------------------------------------------------------- remainder diagnostics

def synthetic_band(n, m, p, k, xi, extra):
    """Band samples = partial sum + known contamination, for rate tests."""
    coeffs = expansion_coefficients(p, k, 2, p + 6)
    values = np.array([evaluate_expansion(coeffs, x) for x in xi]) + extra(xi)
    return BandCurve(n, m, p, xi, values,
                     np.zeros_like(values), np.zeros_like(values)), coeffs


def test_remainder_rate_recovers_power():
    # contaminate with c / xi^4 (the true next term: alpha_3 = 0);
    # k = 110 puts the asymptotic onset at 2 sqrt(k) = 21
    xi = np.linspace(22.0, 44.0, 12)
    band, coeffs = synthetic_band(5, 8, 1, float((21**2 - 1) / 4), xi,
                                  lambda x: 2.7 / x**4)
    report = remainder_rate(band, coeffs, (22.0, 44.0))
    assert not report.indeterminate
    assert report.slope == pytest.approx(-4.0, abs=0.01)


def test_remainder_rate_noise_floor_indeterminate():
    xi = np.linspace(22.0, 44.0, 12)
    band, coeffs = synthetic_band(5, 8, 1, float((21**2 - 1) / 4), xi,
                                  lambda x: 2.7 / x**4)
    report = remainder_rate(band, coeffs, (22.0, 44.0), noise_floor=1.0)
    assert report.indeterminate
    assert report.slope is None


def test_remainder_rate_window_onset_guard():
    # window must start past max(5, 2 sqrt(k)); k = 110 -> onset ~ 21
    xi = np.linspace(8.0, 15.0, 8)
    band, coeffs = synthetic_band(5, 8, 1, float((21**2 - 1) / 4), xi,
                                  lambda x: 1.0 / x**4)
    with pytest.raises(ModelError):
        remainder_rate(band, coeffs, (8.0, 15.0))


def test_exponential_gap_profile():
    # gap g = c xi^(2p-1) e^{-xi^2}: the compensated profile is flat
    xi = np.linspace(2.5, 3.5, 11)
    gap = 2.3 * xi * np.exp(-(xi**2))
    values = 1.0 + gap
    band = BandCurve(4, 0, 1, xi, values, np.zeros_like(xi), np.zeros_like(xi))
    prof = exponential_gap_check(band, 1, (2.5, 3.5))
    assert prof.positive and not prof.indeterminate
    assert prof.ratio == pytest.approx(1.0, abs=1e-9)

    noisy = exponential_gap_check(band, 1, (2.5, 3.5), error_estimate=1.0)
    assert noisy.indeterminate


def test_exponential_gap_requires_zero_coupling_pair():
    xi = np.linspace(2.5, 3.5, 5)
    band = BandCurve(5, 1, 1, xi, 1.0 + np.exp(-(xi**2)),
                     np.zeros_like(xi), np.zeros_like(xi))
    with pytest.raises(ModelError):
        exponential_gap_check(band, 1, (2.5, 3.5))
