"""Least-squares estimation of TVAR parameters.

Two estimators are provided:

* the covariance method (conditional maximum likelihood), which predicts
  ``x[n]`` for ``p <= n < N`` from the ``p`` preceding samples with
  coefficients evaluated at ``n``;
* the autocorrelation method, which zero-pads the record, predicts every
  sample that any nonzero past value can reach, and evaluates coefficient
  ``i`` at ``n - i`` so the Gram matrix is block-Toeplitz.

Public coefficient vectors are always ordered by basis index first
(``alpha_0 | alpha_1 ... alpha_q``, each ``alpha_j`` holding lags ``1..p``).
Design-matrix columns are ordered by lag first, ``(i - 1)(q + 1) + j``; the
conversion between the two layouts lives in :func:`lag_major_to_basis_major`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .errors import DimensionMismatch, InsufficientData, RankDeficient

RANK_TOL = 1e-10


class Method(str, enum.Enum):
    COVARIANCE = "covariance"
    AUTOCORRELATION = "autocorrelation"


@dataclass(frozen=True)
class TvarFit:
    """Estimated TVAR(p) parameters.

    Attributes
    ----------
    p, q : int
        AR order and number of non-constant basis functions.
    alpha : ndarray, shape (p * (q + 1),)
        Expansion coefficients, basis-index-major.
    sigma2 : float
        Gain estimate, ``||residual||^2 / n_effective``.
    n_effective : int
        ``N - p`` for the covariance method, ``N`` for the autocorrelation method.
    method : Method
    """

    p: int
    q: int
    alpha: np.ndarray
    sigma2: float
    n_effective: int
    method: Method

    @property
    def alpha_ar(self) -> np.ndarray:
        return self.alpha[: self.p]

    @property
    def alpha_tv(self) -> np.ndarray:
        return self.alpha[self.p :]

    @property
    def coefficients(self) -> np.ndarray:
        """``(q + 1, p)`` view; row ``j`` is ``alpha_j``."""
        return self.alpha.reshape(self.q + 1, self.p)


@dataclass(frozen=True)
class DesignMatrix:
    """Regression problem ``target ~ rows @ beta`` with lag-major columns."""

    rows: np.ndarray
    target: np.ndarray
    method: Method
    p: int
    q: int


def lag_major_to_basis_major(beta, p, q):
    """Reorder lag-major coefficients ``(i, j)`` into the canonical layout."""
    return np.asarray(beta).reshape(p, q + 1).T.reshape(-1)


def basis_major_to_lag_major(alpha, p, q):
    return np.asarray(alpha).reshape(q + 1, p).T.reshape(-1)


def _check_lengths(x, basis):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("x must be one-dimensional")
    if x.size != basis.length:
        raise DimensionMismatch(
            f"len(x) = {x.size} does not match basis length {basis.length}"
        )
    return x


def build_covariance_design(x, p: int, basis: BasisSet) -> DesignMatrix:
    """Covariance-form design ``H_x`` of shape ``(N - p, p(q + 1))``.

    Row ``n - p`` is ``(x[n-1], ..., x[n-p]) kron (f_0[n], ..., f_q[n])`` and the
    target is ``(x[p], ..., x[N-1])``.
    """
    x = _check_lengths(x, basis)
    n, q = x.size, basis.q
    if p < 1:
        raise InsufficientData(f"model order must be >= 1, got {p}")
    if n <= p * (q + 1) + p:
        raise InsufficientData(
            f"N = {n} samples cannot support p(q+1) + p = {p * (q + 1) + p}"
        )
    lags = np.column_stack([x[p - i : n - i] for i in range(1, p + 1)])
    f = basis.values[p:]
    rows = (lags[:, :, None] * f[:, None, :]).reshape(n - p, p * (q + 1))
    return DesignMatrix(rows=rows, target=x[p:].copy(), method=Method.COVARIANCE, p=p, q=q)


def build_autocorrelation_design(x, p: int, basis: BasisSet) -> DesignMatrix:
    """Autocorrelation-form design ``H~_x`` of shape ``(N + p, p(q + 1))``.

    Column ``(i, j)`` holds ``f_j[n-i] x[n-i]`` with ``x`` zero outside
    ``[0, N-1]``; rows run over every ``n`` that a nonzero lagged sample reaches.
    The target is ``x`` followed by ``p`` zeros.
    """
    x = _check_lengths(x, basis)
    n, q = x.size, basis.q
    if p < 1:
        raise InsufficientData(f"model order must be >= 1, got {p}")
    if n <= p * (q + 1):
        raise InsufficientData(f"N = {n} samples cannot support p(q+1) = {p * (q + 1)}")
    g = basis.values * x[:, None]
    rows = np.zeros((n + p, p, q + 1))
    for i in range(1, p + 1):
        rows[i : i + n, i - 1, :] = g
    target = np.concatenate([x, np.zeros(p)])
    return DesignMatrix(
        rows=rows.reshape(n + p, p * (q + 1)),
        target=target,
        method=Method.AUTOCORRELATION,
        p=p,
        q=q,
    )


def solve_least_squares(rows, target, rank_tol=RANK_TOL):
    """SVD least squares with an explicit conditioning check.

    Returns ``(beta, residual)``.  Raises :class:`RankDeficient` when the
    smallest singular value is below ``rank_tol`` times the largest.
    """
    beta, _, _, sv = np.linalg.lstsq(rows, target, rcond=None)
    if sv.size == 0 or not sv[0] > 0 or sv[-1] < rank_tol * sv[0] or sv.size < rows.shape[1]:
        smin = sv[-1] if sv.size else 0.0
        smax = sv[0] if sv.size else 0.0
        raise RankDeficient(
            f"design matrix is numerically rank deficient "
            f"(sigma_min = {smin:.3e}, sigma_max = {smax:.3e})"
        )
    residual = target - rows @ beta
    return beta, residual


def _fit_from_design(design: DesignMatrix, n_effective, columns=None):
    rows = design.rows if columns is None else design.rows[:, columns]
    q = design.q if columns is None else 0
    beta, resid = solve_least_squares(rows, design.target)
    alpha = lag_major_to_basis_major(beta, design.p, q)
    sigma2 = float(resid @ resid) / n_effective
    return TvarFit(
        p=design.p, q=q, alpha=alpha, sigma2=sigma2, n_effective=n_effective, method=design.method
    )


def constant_columns(p, q):
    """Indices of the ``f_0`` columns in a lag-major design."""
    return np.arange(p) * (q + 1)


def fit_covariance(x, p: int, basis: BasisSet) -> TvarFit:
    """Conditional ML (generalized covariance-method) TVAR(p) fit.

    With ``basis.q == 0`` this is the classical covariance method of linear
    prediction.
    """
    design = build_covariance_design(x, p, basis)
    return _fit_from_design(design, design.target.size)


def fit_autocorrelation(x, p: int, basis: BasisSet, window=None) -> TvarFit:
    """Generalized autocorrelation-method TVAR(p) fit.

    If ``window`` is given the record is multiplied by it before fitting.
    ``sigma2`` is the residual energy over all predicted samples divided by N.
    """
    x = _check_lengths(x, basis)
    if window is not None:
        window = np.asarray(window, dtype=float)
        if window.shape != x.shape:
            raise DimensionMismatch("window length must equal len(x)")
        x = x * window
    design = build_autocorrelation_design(x, p, basis)
    return _fit_from_design(design, x.size)


def prediction_error(x, fit: TvarFit, basis: BasisSet, window=None) -> np.ndarray:
    """Residual sequence of ``fit`` on ``x``.

    Covariance fits give ``e[n]`` for ``p <= n < N``; autocorrelation fits give
    the ``N + p`` zero-padded residuals (after applying ``window``, if any).
    When the fit came from the same data, ``sum(e**2) / fit.n_effective``
    equals ``fit.sigma2``.
    """
    if basis.q != fit.q:
        raise DimensionMismatch(f"fit has q = {fit.q} but basis has q = {basis.q}")
    x = _check_lengths(x, basis)
    if fit.method is Method.COVARIANCE:
        design = build_covariance_design(x, fit.p, basis)
    else:
        if window is not None:
            x = x * np.asarray(window, dtype=float)
        design = build_autocorrelation_design(x, fit.p, basis)
    beta = basis_major_to_lag_major(fit.alpha, fit.p, fit.q)
    return design.target - design.rows @ beta
