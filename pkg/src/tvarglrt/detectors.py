"""Sequential and sliding-window detectors built on the GLRT statistic.

* :func:`detect_formant_changes` merges consecutive short-time segments
  from left to right until the merged record is declared nonstationary.
* :func:`detect_goi` scans one pitch period from a glottal closure and
  reports the first window whose statistic crosses the CFAR threshold.
* :func:`detect_gci` places a glottal closure at the midpoint of the
  window with the largest statistic.
* :func:`detect_goi_wmg` is the normalized prediction-error baseline for
  the same scan.

Window conventions: a window with right edge ``w_r`` covers
``x[w_r - N0 : w_r]``, and the basis is always evaluated over the window
(or merged segment) actually being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import wmg_eta
from .basis import BasisKind, make_basis
from .errors import InsufficientData, InvalidArgument, InvalidPitchPeriod, RankDeficient
from .glrt import cfar_threshold, glrt_statistic


@dataclass(frozen=True)
class DetectorConfig:
    """Window length ``N0``, model orders and CFAR level shared by all detectors."""

    window_samples: int
    p: int
    q: int
    basis_kind: BasisKind = BasisKind.LEGENDRE
    cfar_rate: float = 0.01
    sample_rate: float = 16000.0

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise InvalidArgument("detectors need p >= 1 and q >= 1")
        if self.window_samples <= self.p * (self.q + 1) + self.p:
            raise InvalidArgument(
                f"window of {self.window_samples} samples cannot support "
                f"p = {self.p}, q = {self.q}"
            )
        if not 0.0 < self.cfar_rate < 1.0:
            raise InvalidArgument("cfar_rate must lie in (0, 1)")
        if not self.sample_rate > 0:
            raise InvalidArgument("sample_rate must be positive")
        object.__setattr__(self, "basis_kind", BasisKind(self.basis_kind))

    @classmethod
    def formant(cls, sample_rate=16000.0, **overrides):
        """16 ms segments, p = 4, q = 2, 1% CFAR."""
        kw = dict(window_samples=int(round(0.016 * sample_rate)), p=4, q=2,
                  cfar_rate=0.01, sample_rate=sample_rate)
        kw.update(overrides)
        return cls(**kw)

    @classmethod
    def goi(cls, sample_rate=16000.0, **overrides):
        """50-sample windows, p = 4, q = 1, 15% CFAR."""
        kw = dict(window_samples=50, p=4, q=1, cfar_rate=0.15, sample_rate=sample_rate)
        kw.update(overrides)
        return cls(**kw)

    @classmethod
    def gci(cls, sample_rate=16000.0, **overrides):
        """50-sample windows, p = 4, q = 2 (no threshold is used)."""
        kw = dict(window_samples=50, p=4, q=2, cfar_rate=0.15, sample_rate=sample_rate)
        kw.update(overrides)
        return cls(**kw)

    @property
    def threshold(self) -> float:
        return cfar_threshold(self.p, self.q, self.cfar_rate)

    def statistic(self, x_w) -> float:
        """GLRT statistic of one window with the basis evaluated over it.

        A window whose design matrix is rank deficient (digital silence, or
        fewer nonzero samples than parameters) carries no evidence of change
        and scores 0.
        """
        x_w = np.asarray(x_w, dtype=float)
        basis = make_basis(self.basis_kind, self.q, x_w.size)
        try:
            return glrt_statistic(x_w, self.p, basis).statistic
        except RankDeficient:
            return 0.0


@dataclass(frozen=True)
class ChangeMarkers:
    """Output of the sequential formant change detector.

    ``statistic_trace[k - 1]`` is the statistic computed when segment ``k``
    (0-based) was appended; ``flags[k - 1]`` records whether it triggered a
    reset.  Markers sit at the first sample of the triggering segment.
    """

    marker_indices: np.ndarray
    segment_boundaries: np.ndarray
    statistic_trace: np.ndarray
    flags: np.ndarray
    threshold: float


@dataclass(frozen=True)
class EventDetection:
    """A single glottal event estimate.

    ``index`` is ``None`` for a missed detection.  ``trace`` holds the
    statistic at each scanned position and ``positions`` the sample index
    each entry refers to (window right edge for GOI scans, window midpoint
    for GCI scans).
    """

    index: Optional[int]
    event: str
    statistic: float
    threshold: Optional[float]
    trace: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)

    @property
    def missed(self) -> bool:
        return self.index is None


def detect_formant_changes(x, cfg: DetectorConfig) -> ChangeMarkers:
    """Sequential merge-and-test change detector.

    ``x`` is cut into ``K = len(x) // N0`` consecutive segments (a trailing
    partial segment is ignored).  The left accumulation absorbs the next
    segment while the merged statistic stays below the CFAR threshold; on a
    detection the boundary is marked and accumulation restarts from the
    newly appended segment.
    """
    x = np.asarray(x, dtype=float)
    n0 = cfg.window_samples
    k_total = x.size // n0
    if k_total < 2:
        raise InsufficientData(f"need at least two {n0}-sample segments, got {x.size} samples")
    gamma = cfg.threshold
    bounds = np.arange(k_total + 1) * n0
    trace = np.empty(k_total - 1)
    flags = np.zeros(k_total - 1, dtype=bool)
    left = 0
    for k in range(1, k_total):
        t = cfg.statistic(x[left : bounds[k + 1]])
        trace[k - 1] = t
        if t >= gamma:
            flags[k - 1] = True
            left = bounds[k]
    return ChangeMarkers(
        marker_indices=bounds[1:-1][flags],
        segment_boundaries=bounds,
        statistic_trace=trace,
        flags=flags,
        threshold=gamma,
    )


def _check_period(x, g1, g2, n0):
    g1, g2 = int(g1), int(g2)
    if g1 < 0 or g2 > x.size or g1 >= g2:
        raise InvalidArgument(f"closure indices ({g1}, {g2}) do not fit a record of {x.size}")
    if g2 - g1 <= n0:
        raise InvalidPitchPeriod(
            f"pitch period of {g2 - g1} samples is not longer than the {n0}-sample window"
        )
    return g1, g2


def _scan(x, g1, g2, n0, score, threshold, event):
    edges = np.arange(g1 + n0, g2)
    trace = np.empty(edges.size)
    for k, w_r in enumerate(edges):
        trace[k] = score(x[w_r - n0 : w_r])
        if trace[k] >= threshold:
            return EventDetection(int(w_r), event, float(trace[k]), threshold,
                                  trace[: k + 1], edges[: k + 1])
    return EventDetection(None, event, math.nan, threshold, trace, edges)


def detect_goi(x, g1: int, g2: int, cfg: DetectorConfig) -> EventDetection:
    """First window right edge in ``[g1 + N0, g2)`` whose statistic reaches the threshold."""
    x = np.asarray(x, dtype=float)
    g1, g2 = _check_period(x, g1, g2, cfg.window_samples)
    return _scan(x, g1, g2, cfg.window_samples, cfg.statistic, cfg.threshold, "goi")


def detect_goi_wmg(x, g1: int, g2: int, cfg: DetectorConfig, eta_threshold: float) -> EventDetection:
    """Same scan as :func:`detect_goi`, triggered by the normalized AR error ``eta``.

    The threshold has no statistical calibration and must be chosen by the
    caller.  ``cfg.q`` is unused.
    """
    x = np.asarray(x, dtype=float)
    g1, g2 = _check_period(x, g1, g2, cfg.window_samples)
    return _scan(
        x, g1, g2, cfg.window_samples, lambda w: wmg_eta(w, cfg.p), float(eta_threshold), "goi"
    )


def gci_trace(x, cfg: DetectorConfig, search_range=None):
    """Statistic for every window start in ``search_range``.

    Returns ``(midpoints, trace)`` where window ``x[s : s + N0]`` has
    midpoint ``s + N0 // 2``.
    """
    x = np.asarray(x, dtype=float)
    n0 = cfg.window_samples
    start, stop = (0, x.size) if search_range is None else map(int, search_range)
    if start < 0 or stop > x.size:
        raise InvalidArgument(f"search range ({start}, {stop}) exceeds the record")
    if stop - start < n0:
        raise InsufficientData(f"search range of {stop - start} samples is shorter than N0 = {n0}")
    starts = np.arange(start, stop - n0 + 1)
    trace = np.array([cfg.statistic(x[s : s + n0]) for s in starts])
    return starts + n0 // 2, trace


def detect_gci(x, cfg: DetectorConfig, search_range=None) -> EventDetection:
    """Glottal closure at the midpoint of the window with the largest statistic.

    Windows lie entirely inside ``search_range = (start, stop)``; ties go to
    the earliest window.
    """
    mids, trace = gci_trace(x, cfg, search_range)
    best = int(np.argmax(trace))
    return EventDetection(int(mids[best]), "gci", float(trace[best]), None, trace, mids)


def detect_gci_periodic(x, cfg: DetectorConfig, period: int, offset: int = 0):
    """One closure per ``period``-sample block of window midpoints.

    The statistic is computed once over the whole record; each block
    ``[offset + k*period, offset + (k+1)*period)`` of midpoints contributes
    its argmax.  Blocks with no admissible midpoint are skipped.
    """
    if period < 1:
        raise InvalidArgument("period must be >= 1")
    mids, trace = gci_trace(x, cfg)
    out = []
    lo = offset
    while lo <= mids[-1]:
        sel = np.flatnonzero((mids >= lo) & (mids < lo + period))
        if sel.size:
            best = sel[int(np.argmax(trace[sel]))]
            out.append(EventDetection(int(mids[best]), "gci", float(trace[best]), None,
                                      trace[sel], mids[sel]))
        lo += period
    return out
