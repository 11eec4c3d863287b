"""Deterministic basis functions for expanding TVAR coefficient trajectories.

Each coefficient trajectory is written as ``a_i[n] = sum_j alpha_ij f_j[n]`` with
``f_0[n] = 1``.  Functions are evaluated on a window-relative grid, so a basis of
length ``N`` always spans the same shapes regardless of ``N``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import DimensionMismatch, InvalidArgument


class BasisKind(str, enum.Enum):
    LEGENDRE = "legendre"
    FOURIER = "fourier"


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Sampled basis functions over a window.

    Attributes
    ----------
    kind : BasisKind
    q : int
        Number of non-constant functions.
    length : int
        Window length ``N`` in samples.
    values : ndarray, shape (N, q + 1)
        Column ``j`` holds ``f_j[0], ..., f_j[N-1]``; column 0 is all ones.
        The array is read-only.
    """

    kind: BasisKind
    q: int
    length: int
    values: np.ndarray

    @property
    def n_functions(self) -> int:
        return self.q + 1

    def constant_only(self) -> "BasisSet":
        """The ``q = 0`` basis over the same window."""
        return make_basis(self.kind, 0, self.length)


def _legendre_values(q, n_samples):
    t = 2.0 * np.arange(n_samples) / (n_samples - 1) - 1.0
    return legendre.legvander(t, q)


def _fourier_values(q, n_samples):
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    cols = [np.ones(n_samples)]
    k = 1
    while len(cols) < q + 1:
        cols.append(np.cos(k * theta))
        if len(cols) < q + 1:
            cols.append(np.sin(k * theta))
        k += 1
    return np.column_stack(cols)


@functools.lru_cache(maxsize=512)
def _cached_basis(kind, q, n_samples):
    if kind is BasisKind.LEGENDRE:
        values = _legendre_values(q, n_samples)
    else:
        values = _fourier_values(q, n_samples)
    values = np.ascontiguousarray(values, dtype=float)
    values.flags.writeable = False
    return BasisSet(kind=kind, q=q, length=n_samples, values=values)


def make_basis(kind: BasisKind | str, q: int, n_samples: int) -> BasisSet:
    """Evaluate ``q + 1`` basis functions on an ``n_samples`` window.

    Legendre functions use the affine map ``t = 2n/(N-1) - 1`` onto [-1, 1].
    Fourier functions are ordered ``1, cos(wn), sin(wn), cos(2wn), ...`` with
    ``w = 2*pi/N`` and truncated to ``q`` non-constant columns.

    Results are cached; the returned object is immutable and may be shared.
    """
    try:
        kind = BasisKind(kind)
    except ValueError:
        raise InvalidArgument(f"unknown basis kind {kind!r}") from None
    q = int(q)
    n_samples = int(n_samples)
    if n_samples < 2:
        raise InvalidArgument(f"n_samples must be >= 2, got {n_samples}")
    if q < 0:
        raise InvalidArgument(f"q must be >= 0, got {q}")
    return _cached_basis(kind, q, n_samples)


def coefficient_matrix(alpha, p: int, q: int) -> np.ndarray:
    """Reshape a coefficient vector into a ``(q + 1, p)`` matrix.

    ``alpha`` is ordered by basis index first, ``(alpha_0 | alpha_1 ... alpha_q)``
    with ``alpha_j = (alpha_1j, ..., alpha_pj)``; row ``j`` of the result is
    ``alpha_j``.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size != p * (q + 1):
        raise DimensionMismatch(
            f"alpha has {alpha.size} entries, expected p(q+1) = {p * (q + 1)}"
        )
    return alpha.reshape(q + 1, p)


def eval_trajectories(alpha, basis: BasisSet, p: int) -> np.ndarray:
    """Coefficient trajectories ``A[n, i-1] = a_i[n]`` as an ``(N, p)`` array."""
    coef = coefficient_matrix(alpha, p, basis.q)
    return basis.values @ coef
