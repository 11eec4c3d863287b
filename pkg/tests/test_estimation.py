import mpmath
import numpy as np
import pytest

from tvarglrt.basis import make_basis
from tvarglrt.errors import DimensionMismatch, InsufficientData, RankDeficient
from tvarglrt.estimation import (
    Method,
    basis_major_to_lag_major,
    build_autocorrelation_design,
    build_covariance_design,
    fit_autocorrelation,
    fit_covariance,
    lag_major_to_basis_major,
    prediction_error,
)
from tvarglrt.synth import simulate_tvar, tv_ar_filter


def ar_signal(a, n, seed, burn=500):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(n + burn)
    return tv_ar_filter(np.broadcast_to(np.asarray(a, float), (n + burn, len(a))), d)[burn:]


def test_layout_conversions_are_inverse():
    a = np.arange(12.0)
    np.testing.assert_array_equal(basis_major_to_lag_major(lag_major_to_basis_major(a, 3, 3), 3, 3), a)
    # lag-major (i, j) -> basis-major (j, i)
    np.testing.assert_array_equal(lag_major_to_basis_major([10, 11, 20, 21], 2, 1), [10, 20, 11, 21])


def test_covariance_design_p1_q0_is_lagged_column():
    x = np.arange(1.0, 8.0)
    d = build_covariance_design(x, 1, make_basis("legendre", 0, x.size))
    np.testing.assert_array_equal(d.rows[:, 0], x[:-1])
    np.testing.assert_array_equal(d.target, x[1:])


def test_covariance_design_p1_q1_rows():
    x = np.random.default_rng(1).standard_normal(9)
    b = make_basis("legendre", 1, 9)
    d = build_covariance_design(x, 1, b)
    for n in range(1, 9):
        np.testing.assert_array_equal(d.rows[n - 1], [x[n - 1], b.values[n, 1] * x[n - 1]])


def test_covariance_design_matches_loop_oracle():
    rng = np.random.default_rng(2)
    p, q, n = 2, 2, 20
    x = rng.standard_normal(n)
    b = make_basis("legendre", q, n)
    ref = np.zeros((n - p, p * (q + 1)))
    for t in range(p, n):
        for i in range(1, p + 1):
            for j in range(q + 1):
                ref[t - p, (i - 1) * (q + 1) + j] = b.values[t, j] * x[t - i]
    np.testing.assert_array_equal(build_covariance_design(x, p, b).rows, ref)


def test_autocorrelation_design_matches_loop_oracle():
    rng = np.random.default_rng(3)
    p, q, n = 3, 2, 15
    x = rng.standard_normal(n)
    b = make_basis("legendre", q, n)
    ref = np.zeros((n + p, p * (q + 1)))
    for t in range(n + p):
        for i in range(1, p + 1):
            if 0 <= t - i < n:
                for j in range(q + 1):
                    ref[t, (i - 1) * (q + 1) + j] = b.values[t - i, j] * x[t - i]
    d = build_autocorrelation_design(x, p, b)
    np.testing.assert_array_equal(d.rows, ref)
    np.testing.assert_array_equal(d.target, np.concatenate([x, np.zeros(p)]))


def test_autocorrelation_gram_is_block_toeplitz():
    rng = np.random.default_rng(4)
    p, q, n = 3, 2, 40
    x = rng.standard_normal(n)
    d = build_autocorrelation_design(x, p, make_basis("legendre", q, n))
    G = d.rows.T @ d.rows
    m = q + 1
    block = lambda i, k: G[i * m : (i + 1) * m, k * m : (k + 1) * m]  # noqa: E731
    for i in range(p):
        np.testing.assert_allclose(block(i, i), block(i, i).T, atol=1e-12)
        for k in range(p):
            # depends only on the lag difference; transposed across the diagonal
            if i + 1 < p and k + 1 < p:
                np.testing.assert_allclose(block(i + 1, k + 1), block(i, k), atol=1e-12)
            np.testing.assert_allclose(block(k, i), block(i, k).T, atol=1e-12)


def test_noiseless_ar1_recovered_exactly():
    x = 0.5 ** np.arange(12)
    fit = fit_covariance(x, 1, make_basis("legendre", 0, x.size))
    assert fit.alpha == pytest.approx([0.5], abs=1e-14)
    assert fit.sigma2 == pytest.approx(0.0, abs=1e-28)
    assert np.max(np.abs(prediction_error(x, fit, make_basis("legendre", 0, x.size)))) < 1e-15


def test_covariance_q0_matches_extended_precision_normal_equations():
    x = ar_signal([1.2, -0.6], 3000, seed=5)
    fit = fit_covariance(x, 2, make_basis("legendre", 0, x.size))
    mpmath.mp.dps = 40
    xs = [mpmath.mpf(float(v)) for v in x]
    n = len(xs)
    R = mpmath.matrix(2, 2)
    r = mpmath.matrix(2, 1)
    for i in range(2):
        r[i] = mpmath.fsum(xs[t] * xs[t - i - 1] for t in range(2, n))
        for k in range(2):
            R[i, k] = mpmath.fsum(xs[t - i - 1] * xs[t - k - 1] for t in range(2, n))
    a = mpmath.lu_solve(R, r)
    np.testing.assert_allclose(fit.alpha, [float(a[0]), float(a[1])], atol=1e-10, rtol=0)
    e2 = mpmath.fsum((xs[t] - a[0] * xs[t - 1] - a[1] * xs[t - 2]) ** 2 for t in range(2, n))
    assert fit.sigma2 == pytest.approx(float(e2) / (n - 2), rel=1e-10)
    assert fit.n_effective == n - 2 and fit.method is Method.COVARIANCE


def levinson(r, p):
    a = np.zeros(0)
    err = r[0]
    for m in range(1, p + 1):
        k = (r[m] - a @ r[m - 1 : 0 : -1]) / err if m > 1 else r[1] / r[0]
        a = np.concatenate([a - k * a[::-1], [k]])
        err *= 1 - k * k
    return a, err


def test_autocorrelation_q0_matches_levinson_on_biased_estimates():
    x = ar_signal([1.2, -0.6], 4000, seed=6)
    n = x.size
    r = np.array([x[: n - k] @ x[k:] for k in range(3)]) / n
    a, err = levinson(r, 2)
    fit = fit_autocorrelation(x, 2, make_basis("legendre", 0, n))
    np.testing.assert_allclose(fit.alpha, a, atol=1e-8, rtol=0)
    assert fit.sigma2 == pytest.approx(err, rel=1e-8)
    assert fit.n_effective == n


def test_autocorrelation_window_is_applied():
    x = ar_signal([0.9], 200, seed=7)
    w = np.hamming(200)
    b = make_basis("legendre", 1, 200)
    f1 = fit_autocorrelation(x, 1, b, window=w)
    f2 = fit_autocorrelation(x * w, 1, b)
    np.testing.assert_allclose(f1.alpha, f2.alpha, rtol=1e-13)
    e = prediction_error(x, f1, b, window=w)
    assert e.size == 201
    assert e @ e / 200 == pytest.approx(f1.sigma2, rel=1e-12)


def test_all_zero_input_is_rank_deficient():
    with pytest.raises(RankDeficient):
        fit_autocorrelation(np.zeros(50), 2, make_basis("legendre", 2, 50))
    with pytest.raises(RankDeficient):
        fit_covariance(np.zeros(50), 2, make_basis("legendre", 2, 50))


def test_residual_orthogonal_to_design():
    x = ar_signal([0.5, -0.3, 0.1], 300, seed=8)
    b = make_basis("fourier", 3, 300)
    fit = fit_covariance(x, 3, b)
    e = prediction_error(x, fit, b)
    d = build_covariance_design(x, 3, b)
    assert np.max(np.abs(d.rows.T @ e)) < 1e-8 * (x @ x)
    assert e @ e / fit.n_effective == pytest.approx(fit.sigma2, rel=1e-12)


def test_hand_computed_prediction_error():
    x = np.array([1.0, 2.0, -1.0, 0.5, 3.0])
    b = make_basis("legendre", 0, 5)
    fit = fit_covariance(x, 1, b)
    fixed = type(fit)(p=1, q=0, alpha=np.array([0.5]), sigma2=0.0, n_effective=4, method=Method.COVARIANCE)
    np.testing.assert_allclose(prediction_error(x, fixed, b), [1.5, -2.0, 1.0, 2.75])


def test_tvar1_ramp_trajectory_consistency():
    n = 4000
    b = make_basis("legendre", 1, n)
    truth = np.array([0.5, 0.2])  # a1 from 0.3 to 0.7
    dev = []
    for s in range(100):
        x = simulate_tvar(truth, b, 1, 1.0, seed=1000 + s)
        fit = fit_covariance(x, 1, b)
        dev.append(np.max(np.abs(b.values @ (fit.alpha - truth))))
    assert np.mean(dev) < 0.05


def test_simulate_tvar_round_trip_coefficients():
    n = 4000
    b = make_basis("legendre", 2, n)
    truth = np.array([0.6, -0.3, 0.1, 0.05, -0.05, 0.02])
    err = np.array([fit_covariance(simulate_tvar(truth, b, 2, 1.0, seed=s), 2, b).alpha - truth
                    for s in range(100)])
    assert np.max(np.abs(err.mean(axis=0))) < 0.05


@pytest.mark.parametrize("n", [4, 6])
def test_too_short_records(n):
    with pytest.raises(InsufficientData):
        fit_covariance(np.arange(1.0, n + 1), 2, make_basis("legendre", 1, n))


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        fit_covariance(np.ones(10), 1, make_basis("legendre", 1, 11))
