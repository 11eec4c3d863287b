"""Classical comparison statistics.

* Brandt's test for a single change in the AR(p) parameters of a record,
  maximized over the split index.
* The normalized AR prediction-error energy used by Wong, Markel and Gray
  for glottal event detection.

Both use covariance-method (conditional least-squares) fits so they are
directly comparable with :func:`tvarglrt.glrt.glrt_statistic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import make_basis
from .errors import InsufficientData, InvalidArgument, ZeroEnergy
from .estimation import build_covariance_design, solve_least_squares


@dataclass(frozen=True)
class BrandtResult:
    """Brandt statistic profile over admissible split indices.

    ``profile[k]`` is the statistic for ``r = first_r + k``; it has
    ``N - 4p - 1`` entries.
    """

    statistic: float
    argmax_r: int
    profile: np.ndarray
    first_r: int

    @property
    def split_indices(self) -> np.ndarray:
        return self.first_r + np.arange(self.profile.size)


def _lagged(x, p):
    n = x.size
    return np.column_stack([x[p - i : n - i] for i in range(1, p + 1)])


def _check_split(n, p, r):
    if p < 1:
        raise InvalidArgument(f"model order must be >= 1, got {p}")
    if n < 4 * p + 2:
        raise InsufficientData(f"N = {n} is too short for a split AR({p}) test")
    if not 2 * p < r < n - 2 * p:
        raise InsufficientData(f"split index r = {r} outside ({2 * p}, {n - 2 * p})")


def _split_statistic(rss0, rss1, rss2, n, p, r):
    """``(N-p) ln s0 - (r-p) ln s1 - (N-r) ln s2`` with per-segment ML gains."""
    n0, n1, n2 = n - p, r - p, n - r
    if rss1 <= 0.0 or rss2 <= 0.0:
        return math.inf if rss0 > 0.0 else 0.0
    t = n0 * math.log(rss0 / n0) - n1 * math.log(rss1 / n1) - n2 * math.log(rss2 / n2)
    return max(0.0, t)


def brandt_statistic_at(x, p: int, r: int) -> float:
    """Two-segment vs. pooled AR(p) log-likelihood ratio at split ``r``.

    The first segment predicts ``x[p..r-1]`` from ``x[0..r-1]``; the second
    predicts ``x[r..N-1]``, conditioned on the ``p`` samples preceding ``r``.
    Each segment gets its own AR coefficients and innovation variance, so

        T'_r = (N-p) ln s0 - (r-p) ln s1 - (N-r) ln s2,

    with ``s`` the residual energy divided by the residual count.  The two
    segments together predict the same samples as the pooled fit, which
    makes the statistic nonnegative and invariant to the scale of ``x``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    _check_split(n, p, r)
    lags = _lagged(x, p)
    target = x[p:]
    split = r - p
    _, e0 = solve_least_squares(lags, target)
    _, e1 = solve_least_squares(lags[:split], target[:split])
    _, e2 = solve_least_squares(lags[split:], target[split:])
    return _split_statistic(float(e0 @ e0), float(e1 @ e1), float(e2 @ e2), n, p, r)


def _prefix_sums(lags, target):
    """Prefix sums of the normal-equation terms ``z z^T``, ``z y`` and ``y^2``."""
    outer = np.cumsum(lags[:, :, None] * lags[:, None, :], axis=0)
    cross = np.cumsum(lags * target[:, None], axis=0)
    energy = np.cumsum(target * target)
    return outer, cross, energy


def _rss_from_sums(G, b, e):
    # batched e - b' G^{-1} b
    sol = np.linalg.solve(G, b[..., None])[..., 0]
    return np.maximum(e - np.einsum("ki,ki->k", b, sol), 0.0)


def brandt_statistic(x, p: int) -> BrandtResult:
    """Brandt statistic maximized over ``2p < r < N - 2p``.

    Segment fits for all splits come from prefix and suffix sums of the
    normal equations.  Ties in the maximum resolve to the smallest ``r``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if p < 1:
        raise InvalidArgument(f"model order must be >= 1, got {p}")
    if n < 4 * p + 2:
        raise InsufficientData(f"N = {n} is too short for a split AR({p}) test")
    lags = _lagged(x, p)
    target = x[p:]
    energy0 = float(target @ target)
    if energy0 == 0.0:
        raise ZeroEnergy("record has zero energy")
    # normalize so the cumulative sums stay well scaled
    scale = math.sqrt(energy0 / target.size)
    lags = lags / scale
    target = target / scale

    _, e0 = solve_least_squares(lags, target)
    rss0 = float(e0 @ e0)

    G, b, e = _prefix_sums(lags, target)
    splits = np.arange(2 * p + 1, n - 2 * p)
    k = splits - p  # residuals in segment 1
    G1, b1, e1 = G[k - 1], b[k - 1], e[k - 1]
    G2, b2, e2 = G[-1] - G1, b[-1] - b1, e[-1] - e1
    rss1 = _rss_from_sums(G1, b1, e1)
    rss2 = _rss_from_sums(G2, b2, e2)
    profile = np.array(
        [_split_statistic(rss0, s1, s2, n, p, int(r)) for s1, s2, r in zip(rss1, rss2, splits)]
    )
    best = int(np.argmax(profile))
    return BrandtResult(
        statistic=float(profile[best]),
        argmax_r=int(splits[best]),
        profile=profile,
        first_r=2 * p + 1,
    )


def wmg_eta(x_w, p: int) -> float:
    """Normalized residual energy of a time-invariant AR(p) fit to a window.

    ``||e||^2 / ||x_w||^2`` with ``e`` the covariance-method prediction error;
    near 0 for a perfectly predictable window and near 1 for white noise.
    """
    x_w = np.asarray(x_w, dtype=float)
    energy = float(x_w @ x_w)
    if energy == 0.0:
        raise ZeroEnergy("window has zero energy")
    design = build_covariance_design(x_w, p, make_basis("legendre", 0, x_w.size))
    _, resid = solve_least_squares(design.rows, design.target)
    return min(1.0, float(resid @ resid) / energy)
