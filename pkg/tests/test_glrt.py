import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
import scipy.signal
import scipy.stats
from hypothesis import given, settings, strategies as st

from tvarglrt.basis import eval_trajectories, make_basis
from tvarglrt.errors import InvalidArgument, UnstableModel
from tvarglrt.glrt import (
    ar_autocovariance,
    cfar_threshold,
    chi2_cdf,
    chi2_isf,
    chi2_sf,
    glrt_statistic,
    glrt_statistic_autocorrelation,
    noncentrality_schur,
    noncentrality_trace,
    power,
    step_down_autocorrelation,
)
from tvarglrt.synth import simulate_tvar


def chi2_pdf(d, t):
    return t ** (d / 2 - 1) * math.exp(-t / 2) / (2 ** (d / 2) * math.gamma(d / 2))


def quad_cdf(d, t):
    return scipy.integrate.quad(lambda u: chi2_pdf(d, u), 0, t, epsabs=1e-13, epsrel=1e-12, limit=200)[0]


def random_stable_ar(rng, p):
    roots = []
    while len(roots) < p:
        if p - len(roots) >= 2 and rng.random() < 0.6:
            z = rng.uniform(0.2, 0.85) * np.exp(1j * rng.uniform(0.1, np.pi - 0.1))
            roots += [z, np.conj(z)]
        else:
            roots.append(rng.uniform(-0.85, 0.85))
    return -np.real(np.poly(roots))[1:]


# --- statistic ---------------------------------------------------------------

def test_statistic_zero_when_fits_coincide():
    # a pure constant input is fit exactly by either model
    x = 0.8 ** np.arange(40)
    r = glrt_statistic(x, 1, make_basis("legendre", 2, 40))
    assert r.statistic == 0.0 and r.degenerate


def test_statistic_matches_definition():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(300)
    b = make_basis("legendre", 3, 300)
    r = glrt_statistic(x, 2, b)
    assert r.statistic == pytest.approx((300 - 2) * math.log(r.sigma2_h0 / r.sigma2_h1), rel=1e-14)
    assert r.dof == 6 and r.n_effective == 298
    assert r.sigma2_h1 <= r.sigma2_h0
    # null fit is the ordinary q = 0 covariance fit
    h0 = glrt_statistic(x, 2, make_basis("legendre", 1, 300)).fit_h0
    np.testing.assert_allclose(r.fit_h0.alpha, h0.alpha, rtol=1e-12)


def test_statistic_is_scale_invariant():
    x = np.random.default_rng(1).standard_normal(400)
    b = make_basis("legendre", 4, 400)
    assert glrt_statistic(3 * x, 2, b).statistic == pytest.approx(glrt_statistic(x, 2, b).statistic, rel=1e-12)


def test_white_noise_draws_rarely_exceed_40():
    b = make_basis("legendre", 4, 400)
    rng = np.random.default_rng(2)
    t = np.array([glrt_statistic(rng.standard_normal(400), 2, b).statistic for _ in range(2000)])
    assert np.all(t >= 0)
    assert np.mean(t <= 40) > 0.999
    assert np.mean(t) == pytest.approx(8, abs=0.6)


def test_exceeds_uses_inclusive_threshold():
    x = np.random.default_rng(3).standard_normal(100)
    r = glrt_statistic(x, 1, make_basis("legendre", 1, 100))
    assert r.exceeds(r.statistic) and not r.exceeds(r.statistic + 1e-9)


def test_autocorrelation_statistic_basic_properties():
    x = np.random.default_rng(4).standard_normal(196)
    b = make_basis("legendre", 2, 196)
    rect = glrt_statistic_autocorrelation(x, 3, b)
    ham = glrt_statistic_autocorrelation(x, 3, b, window=np.hamming(196))
    assert rect.statistic >= 0 and ham.statistic >= 0 and rect.statistic != ham.statistic
    assert rect.statistic == pytest.approx(193 * math.log(rect.sigma2_h0 / rect.sigma2_h1), rel=1e-13)


# --- chi-squared --------------------------------------------------------------

def test_chi2_cdf_trivial_values():
    assert chi2_cdf(5, 0.0) == 0.0
    for t in (0.1, 1.0, 7.5, 30.0):
        assert chi2_cdf(2, t) == pytest.approx(1 - math.exp(-t / 2), rel=1e-13)


@pytest.mark.parametrize("d,t", [(8, 15.5073), (1, 0.3), (3, 2.0), (13, 20.0), (20, 5.0)])
def test_chi2_cdf_matches_integration(d, t):
    assert chi2_cdf(d, t) == pytest.approx(quad_cdf(d, t), abs=1e-10)


def test_chi2_cdf_at_quoted_threshold():
    assert abs(chi2_cdf(8, 15.5073) - 0.95) < 1e-4


def test_chi2_sf_complements_cdf():
    t = np.linspace(0, 50, 21)
    np.testing.assert_allclose(chi2_sf(6, t) + chi2_cdf(6, t), 1.0, rtol=1e-14)


@pytest.mark.parametrize("d,rate,expected", [(8, 0.05, 15.507), (2, 0.05, 5.991)])
def test_cfar_threshold_known_values(d, rate, expected):
    g = chi2_isf(d, rate)
    assert g == pytest.approx(expected, abs=1e-3)
    # root of the integration-oracle CDF
    assert quad_cdf(d, g) == pytest.approx(1 - rate, abs=1e-4)


def test_cfar_threshold_from_orders():
    assert cfar_threshold(2, 4, 0.05) == pytest.approx(15.507, abs=1e-3)
    assert cfar_threshold(1, 2, 0.05) == pytest.approx(5.991, abs=1e-3)


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 60), rate=st.floats(1e-9, 1 - 1e-9))
def test_isf_inverts_sf(d, rate):
    assert chi2_sf(d, chi2_isf(d, rate)) == pytest.approx(rate, rel=1e-9, abs=1e-15)


def test_threshold_decreases_to_zero_as_rate_grows():
    rates = [0.5, 0.9, 0.99, 0.999, 1 - 1e-6]
    g = [chi2_isf(8, r) for r in rates]
    assert all(a > b for a, b in zip(g, g[1:]))
    assert 0 < g[-1] < 0.5


@pytest.mark.parametrize("args", [(0, 0.05), (2.5, 0.05), (2, 0.0), (2, 1.0)])
def test_isf_argument_checks(args):
    with pytest.raises(InvalidArgument):
        chi2_isf(*args)


def test_cdf_rejects_negative_argument():
    with pytest.raises(InvalidArgument):
        chi2_cdf(2, -1.0)


# --- step-down autocovariance ----------------------------------------------------

@pytest.mark.parametrize("a1,s2", [(0.5, 1.0), (-0.9, 2.0), (0.0, 1.0)])
def test_ar1_autocovariance_closed_form(a1, s2):
    r = step_down_autocorrelation([a1], s2)
    assert r[0] == pytest.approx(s2 / (1 - a1 * a1), rel=1e-14)
    r5 = ar_autocovariance([a1], s2, 5)
    np.testing.assert_allclose(r5, s2 / (1 - a1 * a1) * a1 ** np.arange(5), rtol=1e-13, atol=1e-15)


def test_ar2_autocovariance_closed_form():
    a1, a2 = 0.6, -0.3
    r0 = (1 - a2) / ((1 + a2) * ((1 - a2) ** 2 - a1 * a1))
    r1 = a1 * r0 / (1 - a2)
    np.testing.assert_allclose(step_down_autocorrelation([a1, a2], 1.0), [r0, r1], rtol=1e-13)


def test_ar2_autocovariance_against_long_simulation():
    a = np.array([0.6, -0.3])
    w = np.random.default_rng(5).standard_normal(10_000_000)
    x = scipy.signal.lfilter([1.0], [1.0, -a[0], -a[1]], w)[1000:]
    emp = np.array([x[: x.size - k] @ x[k:] / x.size for k in range(4)])
    np.testing.assert_allclose(ar_autocovariance(a, 1.0, 4), emp, rtol=0.01, atol=0.005)


def test_autocovariance_satisfies_yule_walker():
    rng = np.random.default_rng(6)
    for p in range(1, 7):
        a = random_stable_ar(rng, p)
        r = ar_autocovariance(a, 1.7, p + 1)
        R = scipy.linalg.toeplitz(r[:p])
        np.testing.assert_allclose(R @ a, r[1 : p + 1], rtol=1e-9, atol=1e-12)
        assert r[0] - a @ r[1 : p + 1] == pytest.approx(1.7, rel=1e-9)


def test_unstable_ar_is_rejected():
    with pytest.raises(UnstableModel):
        step_down_autocorrelation([1.5, -0.2], 1.0)
    with pytest.raises(UnstableModel):
        step_down_autocorrelation([1.0], 1.0)


# --- noncentrality and power ------------------------------------------------------

def test_zero_variation_has_zero_noncentrality():
    b = make_basis("legendre", 2, 100)
    spec = noncentrality_schur([0.5, -0.2, 0, 0, 0, 0], 1.0, b, 2)
    assert spec.lambda_ == pytest.approx(0.0, abs=1e-12) and spec.dof == 4


def test_noncentrality_scales_with_inverse_noise_variance_at_fixed_signal_covariance():
    # the Schur form is invariant to sigma because R is proportional to sigma^2;
    # the trace form with R held fixed scales as 1 / sigma^2
    rng = np.random.default_rng(7)
    b = make_basis("legendre", 2, 200)
    alpha = np.concatenate([[0.5, -0.3], 0.05 * rng.standard_normal(4)])
    lam1 = noncentrality_schur(alpha, 1.0, b, 2)
    lam2 = noncentrality_schur(alpha, 4.0, b, 2)
    assert lam2.lambda_ == pytest.approx(lam1.lambda_, rel=1e-10)
    A = eval_trajectories(alpha, b, 2)
    t1 = noncentrality_trace(A, lam1.R, 1.0)
    assert noncentrality_trace(A, lam1.R, 2.0) == pytest.approx(t1 / 2.0, rel=1e-12)


def test_schur_and_trace_agree_on_random_instances():
    rng = np.random.default_rng(8)
    for _ in range(100):
        p, q = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        n = int(rng.integers(max(60, 4 * p * (q + 1)), 401))
        b = make_basis(rng.choice(["legendre", "fourier"]), q, n)
        alpha = np.concatenate([random_stable_ar(rng, p), 0.05 * rng.standard_normal(p * q)])
        s2 = float(rng.uniform(0.2, 3.0))
        spec = noncentrality_schur(alpha, s2, b, p)
        lam_t = noncentrality_trace(eval_trajectories(alpha, b, p), spec.R, s2)
        assert spec.lambda_ == pytest.approx(lam_t, rel=1e-8)


def test_scalar_trace_case_by_hand():
    n = 20
    ramp = np.linspace(-1, 1, n)
    A = (0.3 + 0.1 * ramp)[:, None]
    r0 = 2.5
    at = A[1:, 0] - A[1:, 0].mean()
    assert noncentrality_trace(A, [[r0]], 0.7) == pytest.approx(r0 * np.sum(at**2) / 0.7, rel=1e-13)
    assert noncentrality_trace(np.full((n, 1), 0.3), [[r0]], 0.7) == 0.0


def test_power_central_case():
    assert power(0.0, 8, 15.5) == pytest.approx(1 - chi2_cdf(8, 15.5), rel=1e-14)


@pytest.mark.parametrize("lam,d,g", [(0.5, 1, 3.84), (10.0, 8, 15.5), (80.0, 20, 31.4), (400.0, 4, 9.49),
                                     (3.0, 50, 67.5)])
def test_power_matches_noncentral_chi2(lam, d, g):
    assert power(lam, d, g) == pytest.approx(scipy.stats.ncx2.sf(g, d, lam), rel=1e-9, abs=1e-15)


def test_power_increases_with_noncentrality():
    lam = np.linspace(0, 60, 61)
    pw = [power(v, 8, 15.5) for v in lam]
    assert all(b > a for a, b in zip(pw, pw[1:]))


def test_power_in_dof_at_fixed_false_alarm_rate_decreases():
    pw = [power(10.0, d, chi2_isf(d, 0.05)) for d in range(1, 21)]
    assert all(b < a for a, b in zip(pw, pw[1:]))


def test_power_in_dof_at_fixed_threshold_increases():
    # the added degrees of freedom only shift mass upward when gamma is held fixed
    pw = [power(10.0, d, 15.5) for d in range(1, 21)]
    assert all(b > a for a, b in zip(pw, pw[1:]))


def test_power_predicts_simulated_detection_rate():
    # small TVAR(2) alternative, long record
    n, p, q = 1000, 2, 2
    b = make_basis("legendre", q, n)
    alpha = np.array([0.9, -0.5, 0.11, 0.0, 0.0, -0.07])  # lambda ~ 10, power ~ 0.73
    spec = noncentrality_schur(alpha, 1.0, b, p)
    g = cfar_threshold(p, q, 0.05)
    predicted = power(spec.lambda_, p * q, g)
    hits = [glrt_statistic(simulate_tvar(alpha, b, p, 1.0, seed=s, burn_in=200), p, b).statistic >= g
            for s in range(600)]
    assert np.mean(hits) == pytest.approx(predicted, abs=0.07)
