import math

import mpmath as mpm
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, gammaln

from volswap.errors import DomainError, NoConvergence, PoleError
from volswap.specfun import (
    SeriesResult,
    gamma_ratio,
    gauss_2f1_terminating,
    kummer_1f1,
    laguerre_frac,
    laguerre_int,
    log_gamma,
    pochhammer,
)


# ---------------------------------------------------------------------------
# log_gamma / pochhammer
# ---------------------------------------------------------------------------


def test_log_gamma_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    assert math.isfinite(log_gamma(171.5))
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        log_gamma(-3.0)


def test_log_gamma_reference_accuracy():
    xs = np.geomspace(1e-3, 300.0, 200)
    ours = np.array([log_gamma(x) for x in xs])
    ref = gammaln(xs)
    denom = np.maximum(np.abs(ref), 1.0)
    assert np.max(np.abs(ours - ref) / denom) < 1e-13


def test_gamma_ratio():
    assert gamma_ratio(4.0, 3.0) == pytest.approx(3.0, rel=1e-14)


def test_pochhammer_values():
    assert pochhammer(3.0, 0) == 1.0
    assert pochhammer(-2.0, 3) == 0.0
    assert pochhammer(0.5, 3) == pytest.approx(1.875, rel=1e-15)
    with pytest.raises(DomainError):
        pochhammer(1.0, -1)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.05, 50.0), k=st.integers(0, 20))
def test_pochhammer_gamma_identity(a, k):
    assert pochhammer(a, k) == pytest.approx(
        math.exp(log_gamma(a + k) - log_gamma(a)), rel=1e-12
    )


# ---------------------------------------------------------------------------
# terminating 2F1
# ---------------------------------------------------------------------------


def test_2f1_trivials():
    assert gauss_2f1_terminating(0, 2.0, 3.0, 0.7) == 1.0
    assert gauss_2f1_terminating(1, 2.0, 3.0, 1.0) == pytest.approx(1 / 3, rel=1e-15)
    with pytest.raises(DomainError):
        gauss_2f1_terminating(-1, 2.0, 3.0, 1.0)


def test_2f1_pole_detection():
    # (c)_m hits zero with a live numerator
    with pytest.raises(PoleError):
        gauss_2f1_terminating(3, 2.5, -1.0, 0.5)


def test_2f1_vol_strike_parameters_vs_high_precision():
    # The parameter pattern of the half-moment series at nu = 251.
    nu = 251
    for k in (1, 2, 3):
        ours = gauss_2f1_terminating(k, 1.0 - k - nu / 2.0, k - (nu + 1) / 2.0, 1.0)
        with mpm.workdps(50):
            ref = mpm.fsum(
                mpm.rf(-k, m)
                * mpm.rf(mpm.mpf(1) - k - mpm.mpf(nu) / 2, m)
                / mpm.rf(k - (mpm.mpf(nu) + 1) / 2, m)
                / mpm.factorial(m)
                for m in range(k + 1)
            )
        assert ours == pytest.approx(float(ref), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    k=st.integers(0, 12),
    b=st.floats(-5.0, 5.0),
    c=st.floats(0.5, 10.0),
    z=st.floats(-2.0, 2.0),
)
def test_2f1_vs_mpmath(k, b, c, z):
    ours = gauss_2f1_terminating(k, b, c, z)
    with mpm.workdps(40):
        ref = float(mpm.hyp2f1(-k, b, c, z))
    assert ours == pytest.approx(ref, rel=1e-10, abs=1e-12)


# ---------------------------------------------------------------------------
# Kummer 1F1
# ---------------------------------------------------------------------------


def test_1f1_trivials():
    assert kummer_1f1(1.3, 2.7, 0.0).value == 1.0
    r = kummer_1f1(2.5, 2.5, 1.7)
    assert r.value == pytest.approx(math.exp(1.7), rel=1e-12)
    assert r.converged
    with pytest.raises(DomainError):
        kummer_1f1(1.0, -2.0, 0.5)


def test_1f1_negative_argument_oracle():
    ours = kummer_1f1(-0.5, 1.0, -2.5)
    ref = float(mpm.hyp1f1(-0.5, 1.0, -2.5))
    assert ours.value == pytest.approx(ref, rel=1e-11)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-3.0, 5.0),
    b=st.floats(0.3, 8.0),
    z=st.floats(-10.0, 10.0),
)
def test_1f1_kummer_transform_consistency(a, b, z):
    lhs = kummer_1f1(a, b, z).value
    rhs = math.exp(z) * kummer_1f1(b - a, b, -z).value
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_1f1_no_convergence_cap():
    with pytest.raises(NoConvergence):
        kummer_1f1(2.0, 3.0, 50.0, max_terms=5)


# ---------------------------------------------------------------------------
# Laguerre, integer and fractional order
# ---------------------------------------------------------------------------


def test_laguerre_int_trivials():
    assert laguerre_int(0.7, 0, 3.0) == 1.0
    assert laguerre_int(0.7, 1, 3.0) == pytest.approx(1.7 - 3.0, rel=1e-15)
    with pytest.raises(DomainError):
        laguerre_int(0.7, -1, 3.0)


def test_laguerre_int_vs_scipy_grid():
    for a in (-0.5, 0.0, 0.5, 2.0):
        for n in range(11):
            for x in np.linspace(-5, 5, 50):
                ours = laguerre_int(a, n, float(x))
                ref = float(eval_genlaguerre(n, a, x))
                assert abs(ours - ref) < 1e-10 * max(1.0, abs(ref))


def test_laguerre_frac_at_zero_identity():
    for a in (0.0, 0.8, 1.5, 3.0):
        r = laguerre_frac(a, 0.5, 0.0)
        ref = math.exp(log_gamma(a + 1.5) - log_gamma(1.5) - log_gamma(a + 1.0))
        assert r.value == pytest.approx(ref, rel=1e-12)
    assert laguerre_frac(0.0, 0.5, 0.0).value == pytest.approx(1.0, rel=1e-12)


def test_laguerre_frac_vs_mpmath():
    for a, b, x in [(1.5, 0.5, -0.8), (0.5, 0.5, -2.0), (2.0, 1.5, 1.3)]:
        ours = laguerre_frac(a, b, x)
        ref = float(mpm.laguerre(b, a, x))
        assert ours.value == pytest.approx(ref, rel=1e-10)
    with pytest.raises(DomainError):
        laguerre_frac(-1.5, 0.5, 0.0)


def test_noncentral_chi_mean_two_routes():
    # sqrt(pi/2) L_{1/2}^{(eta/2-1)}(-lam/2) vs
    # sqrt(2) Gamma((eta+1)/2)/Gamma(eta/2) 1F1(-1/2; eta/2; -lam/2)
    for eta in (1, 2, 5, 51):
        for lam in (0.0, 0.3, 2.0, 10.0):
            lhs = math.sqrt(math.pi / 2.0) * laguerre_frac(
                eta / 2.0 - 1.0, 0.5, -lam / 2.0
            ).value
            rhs = (
                math.sqrt(2.0)
                * gamma_ratio((eta + 1) / 2.0, eta / 2.0)
                * kummer_1f1(-0.5, eta / 2.0, -lam / 2.0).value
            )
            assert lhs == pytest.approx(rhs, rel=1e-10)


def test_series_result_float():
    r = SeriesResult(value=2.5, terms_used=3, last_term=1e-12, converged=True)
    assert float(r) == 2.5
