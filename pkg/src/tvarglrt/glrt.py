"""AR vs. TVAR generalized likelihood ratio test and its asymptotics.

The statistic compares covariance-method fits with and without the
non-constant basis functions,

    T(x) = (N - p) * ln(sigma2_H0 / sigma2_H1),

which is asymptotically chi-squared with ``p*q`` degrees of freedom under the
stationary null and noncentral chi-squared under a TVAR alternative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from .basis import BasisSet, eval_trajectories
from .errors import InvalidArgument, SingularBlock, UnstableModel
from .estimation import (
    TvarFit,
    _fit_from_design,
    build_autocorrelation_design,
    build_covariance_design,
    constant_columns,
)

# relative residual energy below which a fit is treated as exact
PERFECT_FIT_RTOL = 1e-24

SERIES_RTOL = 1e-14
SERIES_MAX_TERMS = 100_000


@dataclass(frozen=True)
class GlrtResult:
    """Outcome of one AR-vs-TVAR test.

    ``degenerate`` is set when the TVAR residual vanishes; ``statistic`` is then
    ``inf`` (or 0 if the AR residual vanishes too).
    """

    statistic: float
    dof: int
    sigma2_h0: float
    sigma2_h1: float
    n_effective: int
    fit_h0: TvarFit
    fit_h1: TvarFit
    degenerate: bool = False

    def exceeds(self, threshold: float) -> bool:
        return self.statistic >= threshold


def _log_ratio_statistic(sigma2_h0, sigma2_h1, n_effective, energy):
    floor = PERFECT_FIT_RTOL * energy
    if sigma2_h1 <= floor:
        if sigma2_h0 <= floor:
            return 0.0, True
        return math.inf, True
    return max(0.0, n_effective * math.log(sigma2_h0 / sigma2_h1)), False


def glrt_statistic(x, p: int, basis: BasisSet) -> GlrtResult:
    """Covariance-method GLRT statistic for time variation of AR(p) coefficients.

    Both fits share one design matrix; the null fit keeps only the
    constant-function columns.
    """
    design = build_covariance_design(x, p, basis)
    n_eff = design.target.size
    fit_h1 = _fit_from_design(design, n_eff)
    fit_h0 = _fit_from_design(design, n_eff, columns=constant_columns(p, basis.q))
    energy = float(design.target @ design.target) / n_eff
    stat, degenerate = _log_ratio_statistic(fit_h0.sigma2, fit_h1.sigma2, n_eff, energy)
    return GlrtResult(
        statistic=stat,
        dof=p * basis.q,
        sigma2_h0=fit_h0.sigma2,
        sigma2_h1=fit_h1.sigma2,
        n_effective=n_eff,
        fit_h0=fit_h0,
        fit_h1=fit_h1,
        degenerate=degenerate,
    )


def glrt_statistic_autocorrelation(x, p: int, basis: BasisSet, window=None) -> GlrtResult:
    """The same log-ratio statistic built from autocorrelation-method fits.

    Used to study the effect of tapering; it has no chi-squared guarantee.
    The ``N - p`` prefactor is kept so values are comparable with
    :func:`glrt_statistic`.
    """
    x = np.asarray(x, dtype=float)
    if window is not None:
        xw = x * np.asarray(window, dtype=float)
    else:
        xw = x
    design = build_autocorrelation_design(xw, p, basis)
    fit_h1 = _fit_from_design(design, xw.size)
    fit_h0 = _fit_from_design(design, xw.size, columns=constant_columns(p, basis.q))
    n_eff = x.size - p
    energy = float(xw @ xw) / xw.size
    stat, degenerate = _log_ratio_statistic(fit_h0.sigma2, fit_h1.sigma2, n_eff, energy)
    return GlrtResult(
        statistic=stat,
        dof=p * basis.q,
        sigma2_h0=fit_h0.sigma2,
        sigma2_h1=fit_h1.sigma2,
        n_effective=n_eff,
        fit_h0=fit_h0,
        fit_h1=fit_h1,
        degenerate=degenerate,
    )


def _check_dof(dof):
    if int(dof) != dof or dof < 1:
        raise InvalidArgument(f"degrees of freedom must be a positive integer, got {dof}")
    return int(dof)


def chi2_cdf(dof: int, t):
    """Central chi-squared CDF, ``P(dof/2, t/2)`` (regularized lower gamma)."""
    dof = _check_dof(dof)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise InvalidArgument("chi-squared argument must be >= 0")
    out = scipy.special.gammainc(dof / 2.0, t / 2.0)
    return float(out) if out.ndim == 0 else out


def chi2_sf(dof: int, t):
    """Central chi-squared survival function, ``Q(dof/2, t/2)``."""
    dof = _check_dof(dof)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise InvalidArgument("chi-squared argument must be >= 0")
    out = scipy.special.gammaincc(dof / 2.0, t / 2.0)
    return float(out) if out.ndim == 0 else out


def chi2_isf(dof: int, alarm_rate: float) -> float:
    """Threshold ``g`` with ``Pr{chi2_dof > g} = alarm_rate`` by bracketed root finding."""
    dof = _check_dof(dof)
    if not 0.0 < alarm_rate < 1.0:
        raise InvalidArgument(f"alarm rate must lie in (0, 1), got {alarm_rate}")
    a = dof / 2.0

    def excess(g):
        return scipy.special.gammaincc(a, g / 2.0) - alarm_rate

    hi = float(dof)
    while excess(hi) > 0:
        hi *= 2.0
    root = scipy.optimize.brentq(excess, 0.0, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(root)


def cfar_threshold(p: int, q: int, alarm_rate: float) -> float:
    """Asymptotic CFAR threshold for the TVAR GLRT with ``p*q`` degrees of freedom."""
    if p < 1 or q < 1:
        raise InvalidArgument(f"p and q must be >= 1, got p={p}, q={q}")
    return chi2_isf(p * q, alarm_rate)


def _step_down(ar_coeffs):
    """Reflection coefficients and lower-order predictors of a stable AR model."""
    a = np.asarray(ar_coeffs, dtype=float).copy()
    p = a.size
    predictors = [None] * (p + 1)
    k = np.zeros(p)
    predictors[p] = a.copy()
    for m in range(p, 0, -1):
        km = a[m - 1]
        if not abs(km) < 1.0:
            raise UnstableModel(
                f"AR model is not stable (reflection coefficient {m} = {km:.6g})"
            )
        k[m - 1] = km
        if m > 1:
            prev = a[: m - 1]
            a = (prev + km * prev[::-1]) / (1.0 - km * km)
            predictors[m - 1] = a.copy()
    predictors[0] = np.zeros(0)
    return k, predictors


def ar_autocovariance(ar_coeffs, sigma2: float, n_lags: int) -> np.ndarray:
    """Autocovariance ``r[0], ..., r[n_lags - 1]`` of a stable AR(p) process.

    The process is ``x[n] = sum_i a_i x[n-i] + sigma w[n]``.  Reflection
    coefficients come from the step-down recursion, the zero-lag value from the
    prediction-error powers, and higher lags from the Yule-Walker relations.
    """
    a = np.atleast_1d(np.asarray(ar_coeffs, dtype=float))
    p = a.size
    if sigma2 < 0:
        raise InvalidArgument("sigma2 must be >= 0")
    k, predictors = _step_down(a)
    r = np.zeros(max(n_lags, p + 1))
    r[0] = sigma2 / np.prod(1.0 - k**2)
    for m in range(1, p + 1):
        am = predictors[m]
        r[m] = am @ r[m - 1 :: -1][:m]
    for m in range(p + 1, r.size):
        r[m] = a @ r[m - 1 :: -1][:p]
    return r[:n_lags]


def step_down_autocorrelation(ar_coeffs, sigma2: float) -> np.ndarray:
    """First ``p`` autocovariance lags ``r[0..p-1]`` implied by AR(p) coefficients."""
    a = np.atleast_1d(np.asarray(ar_coeffs, dtype=float))
    return ar_autocovariance(a, sigma2, a.size)


@dataclass(frozen=True)
class PowerSpec:
    """Noncentrality of the asymptotic alternative distribution and its ingredients."""

    lambda_: float
    dof: int
    F: np.ndarray
    R: np.ndarray
    A_centered: np.ndarray


def noncentrality_schur(alpha, sigma2: float, basis: BasisSet, p: int) -> PowerSpec:
    """Noncentrality from the Schur complement of the TVAR Fisher information.

    The information is ``kron(F'F, R / sigma2)`` with ``F`` the basis rows
    ``p..N-1`` and ``R`` the Toeplitz autocovariance of the AR part; the Schur
    complement is taken with respect to its leading ``p x p`` block.
    """
    alpha = np.asarray(alpha, dtype=float)
    q = basis.q
    if alpha.size != p * (q + 1):
        raise InvalidArgument(f"alpha must have p(q+1) = {p * (q + 1)} entries")
    F = np.asarray(basis.values[p:])
    R = scipy.linalg.toeplitz(step_down_autocorrelation(alpha[:p], sigma2))
    M = np.kron(F.T @ F, R / sigma2)
    m11, m12, m22 = M[:p, :p], M[:p, p:], M[p:, p:]
    try:
        c, low = scipy.linalg.cho_factor(m11)
    except np.linalg.LinAlgError:
        raise SingularBlock("leading block of the information matrix is singular") from None
    if np.linalg.cond(m11) > 1e12:
        raise SingularBlock("leading block of the information matrix is ill-conditioned")
    schur = m22 - m12.T @ scipy.linalg.cho_solve((c, low), m12)
    a_tv = alpha[p:]
    lam = float(a_tv @ schur @ a_tv)
    A = eval_trajectories(alpha, basis, p)[p:]
    return PowerSpec(
        lambda_=max(lam, 0.0), dof=p * q, F=F, R=R, A_centered=A - A.mean(axis=0)
    )


def noncentrality_trace(trajectories, R, sigma2: float) -> float:
    """Noncentrality ``tr(A~ R A~') / sigma2`` from coefficient trajectories.

    ``trajectories`` is the full ``(N, p)`` matrix; rows ``p..N-1`` are
    column-centered before the trace is formed.
    """
    A = np.asarray(trajectories, dtype=float)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    p = A.shape[1]
    if R.shape != (p, p) or not np.allclose(R, R.T, rtol=1e-12, atol=0):
        raise InvalidArgument("R must be a symmetric p x p matrix")
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        raise InvalidArgument("R must be positive definite") from None
    At = A[p:] - A[p:].mean(axis=0)
    return float(np.einsum("ni,ij,nj->", At, R, At)) / sigma2


def power(lambda_: float, dof: int, threshold: float) -> float:
    """``Pr{chi2_dof(lambda) > threshold}`` via the Poisson-mixture series.

    Terms are summed outward from the Poisson mode until a term falls below
    ``1e-14`` of the running sum (at most ``1e5`` terms).
    """
    dof = _check_dof(dof)
    if lambda_ < 0 or threshold < 0:
        raise InvalidArgument("lambda and threshold must be >= 0")
    half_t = threshold / 2.0
    if lambda_ == 0:
        return float(scipy.special.gammaincc(dof / 2.0, half_t))
    mu = lambda_ / 2.0

    def weight(k):
        return math.exp(-mu + k * math.log(mu) - math.lgamma(k + 1))

    def term(k):
        return weight(k) * scipy.special.gammaincc(dof / 2.0 + k, half_t)

    mode = int(mu)
    total = term(mode)
    n_terms = 1
    k = mode + 1
    while n_terms < SERIES_MAX_TERMS:
        w = weight(k)
        total += w * scipy.special.gammaincc(dof / 2.0 + k, half_t)
        n_terms += 1
        # central terms are <= 1, so the Poisson weight bounds the upper tail
        if w <= SERIES_RTOL * total:
            break
        k += 1
    k = mode - 1
    while k >= 0 and n_terms < SERIES_MAX_TERMS:
        t = term(k)
        total += t
        n_terms += 1
        if t <= SERIES_RTOL * total:
            break
        k -= 1
    return min(float(total), 1.0)
