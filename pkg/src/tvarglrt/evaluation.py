"""Monte-Carlo harness: null calibration, empirical ROC curves and the
synthetic experiment designs used to study the GLRT.

Every trial draws its signal from a seed derived from
``(master_seed, scenario_id, hypothesis, trial_index)``, so results do not
depend on execution order or on the number of worker threads.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence

import numpy as np
import scipy.stats

from .basis import BasisKind, make_basis
from .baselines import brandt_statistic
from .errors import InvalidArgument, ScenarioFailure, TvarError
from .glrt import cfar_threshold, chi2_cdf, glrt_statistic, glrt_statistic_autocorrelation
from .synth import ResonatorSpec, resonator_signal, simulate_tvar, tv_ar_filter

MIN_ROC_TRIALS = 100
MIN_FALSE_ALARM_TRIALS = 500
MIN_KS_SAMPLES = 500
MIN_WINDOWING_TRIALS = 1000

FIG2_DELTAS = tuple(k * np.pi / 80 for k in (1, 3, 5, 7))
FIG2_LENGTHS = (80, 240, 400, 560)
# resonator bandwidth for the δ×N grid; 100 Hz saturates most cells at AUC 1
FIG2_BANDWIDTH = 1500.0
FIG2_OMEGA = np.pi / 4
FIG2_SAMPLE_RATE = 16000.0

H0, H1 = 0, 1


@dataclass(frozen=True)
class Scenario:
    """A named, seeded signal generator.

    ``generate(seed)`` must return a 1-D sample vector that depends only on
    ``seed``.  ``params`` is free-form metadata echoed into reports.
    """

    scenario_id: str
    generate: Callable[[int], np.ndarray] = field(repr=False, compare=False)
    params: Mapping = field(default_factory=dict, compare=False)

    def describe(self) -> dict:
        return {"scenario": self.scenario_id, **dict(self.params)}


def trial_seed(master_seed: int, scenario_id: str, hypothesis: int, trial: int) -> int:
    """64-bit seed for one trial, independent across all four inputs."""
    key = [int(master_seed) & 0xFFFFFFFF, int(master_seed) >> 32,
           zlib.crc32(scenario_id.encode()), int(hypothesis), int(trial)]
    lo, hi = np.random.SeedSequence(key).generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def draw_statistics(scenario: Scenario, statistic: Callable[[np.ndarray], float], trials: int,
                    seed: int, hypothesis: int, threads: Optional[int] = None) -> np.ndarray:
    """Evaluate ``statistic`` on ``trials`` independent draws from ``scenario``.

    Any library error raised by a trial is re-raised as
    :class:`ScenarioFailure` carrying the trial's seed.
    """

    def one(k):
        s = trial_seed(seed, scenario.scenario_id, hypothesis, k)
        try:
            return float(statistic(scenario.generate(s)))
        except (TvarError, np.linalg.LinAlgError, FloatingPointError) as exc:
            raise ScenarioFailure(
                f"{scenario.scenario_id} (hypothesis {hypothesis}, trial {k}, seed {s}): {exc}",
                scenario=scenario.scenario_id, hypothesis=hypothesis, trial=k, seed=s,
            ) from exc

    return np.asarray(_map(one, range(trials), threads), dtype=float)


@dataclass(frozen=True)
class RocCurve:
    """Empirical operating characteristic.

    ``points`` has columns (false_alarm_rate, detection_rate), running from
    (0, 0) to (1, 1) as the threshold decreases through the pooled values.
    """

    points: np.ndarray
    n_trials_h0: int
    n_trials_h1: int
    seed: Optional[int]
    scenario: dict
    statistics_h0: np.ndarray = field(repr=False)
    statistics_h1: np.ndarray = field(repr=False)

    @property
    def false_alarm(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def detection(self) -> np.ndarray:
        return self.points[:, 1]


def roc_points(stats_h0, stats_h1) -> np.ndarray:
    """Exact empirical ROC: one point per distinct pooled statistic value.

    A trial is declared positive when its statistic is >= the threshold.
    """
    h0 = np.sort(np.asarray(stats_h0, dtype=float))
    h1 = np.sort(np.asarray(stats_h1, dtype=float))
    if h0.size == 0 or h1.size == 0:
        raise InvalidArgument("both hypotheses need at least one statistic")
    thresholds = np.unique(np.concatenate([h0, h1]))[::-1]
    fa = (h0.size - np.searchsorted(h0, thresholds, side="left")) / h0.size
    pd = (h1.size - np.searchsorted(h1, thresholds, side="left")) / h1.size
    pts = np.column_stack([np.concatenate([[0.0], fa]), np.concatenate([[0.0], pd])])
    return pts


def roc_from_statistics(stats_h0, stats_h1, seed=None, scenario=None) -> RocCurve:
    h0 = np.asarray(stats_h0, dtype=float)
    h1 = np.asarray(stats_h1, dtype=float)
    return RocCurve(
        points=roc_points(h0, h1),
        n_trials_h0=h0.size,
        n_trials_h1=h1.size,
        seed=seed,
        scenario=dict(scenario or {}),
        statistics_h0=h0,
        statistics_h1=h1,
    )


def run_roc(h0: Scenario, h1: Scenario, statistic: Callable[[np.ndarray], float], trials: int,
            seed: int, threads: Optional[int] = None) -> RocCurve:
    """Empirical ROC of ``statistic`` from ``trials`` draws under each hypothesis."""
    if trials < MIN_ROC_TRIALS:
        raise InvalidArgument(f"ROC estimation needs at least {MIN_ROC_TRIALS} trials, got {trials}")
    s0 = draw_statistics(h0, statistic, trials, seed, H0, threads)
    s1 = draw_statistics(h1, statistic, trials, seed, H1, threads)
    meta = {"h0": h0.describe(), "h1": h1.describe(), "trials": trials, "seed": seed}
    return roc_from_statistics(s0, s1, seed=seed, scenario=meta)


def auc(curve) -> float:
    """Trapezoidal area under a :class:`RocCurve` or an ``(M, 2)`` point array."""
    pts = curve.points if isinstance(curve, RocCurve) else np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] != 2:
        raise InvalidArgument("ROC points must form a nonempty (M, 2) array")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    x, y = pts[order, 0], pts[order, 1]
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def detection_rate_at(curve: RocCurve, false_alarm: float) -> float:
    """Largest empirical detection rate among operating points with FA <= ``false_alarm``."""
    ok = curve.false_alarm <= false_alarm + 1e-12
    return float(curve.detection[ok].max())


@dataclass(frozen=True)
class FalseAlarmEstimate:
    rate: float
    stderr: float
    threshold: float
    nominal: float
    trials: int
    seed: int
    statistics: np.ndarray = field(repr=False)


def default_ar_coefficients(p: int) -> np.ndarray:
    """A fixed stable AR(p): conjugate poles of radius 0.9 spread in angle, plus 0.5 if p is odd."""
    if p < 1:
        raise InvalidArgument("p must be >= 1")
    roots = []
    for k in range(p // 2):
        ang = np.pi * (2 * k + 1) / (p + 2)
        roots += [0.9 * np.exp(1j * ang), 0.9 * np.exp(-1j * ang)]
    if p % 2:
        roots.append(0.5)
    poly = np.real(np.poly(roots))
    return -poly[1:]


def ar_scenario(ar_coeffs, n_samples: int, sigma: float = 1.0, burn_in: int = 0) -> Scenario:
    a = np.asarray(ar_coeffs, dtype=float)

    def gen(seed):
        rng = np.random.default_rng(seed)
        drive = sigma * rng.standard_normal(burn_in + n_samples)
        coeffs = np.broadcast_to(a, (drive.size, a.size))
        return tv_ar_filter(coeffs, drive)[burn_in:]

    return Scenario(
        f"ar{a.size}-N{n_samples}",
        gen,
        {"ar_coeffs": a.round(12).tolist(), "n_samples": n_samples, "sigma": sigma, "burn_in": burn_in},
    )


def glrt_scan_statistic(p: int, q: int, kind=BasisKind.LEGENDRE) -> Callable[[np.ndarray], float]:
    """``x -> T(x)`` with the basis sized to each record."""

    def stat(x):
        return glrt_statistic(x, p, make_basis(kind, q, len(x))).statistic

    return stat


def null_statistics(p: int, q: int, n_samples: int, trials: int, seed: int,
                    ar_coeffs=None, threads: Optional[int] = None) -> np.ndarray:
    a = default_ar_coefficients(p) if ar_coeffs is None else ar_coeffs
    return draw_statistics(ar_scenario(a, n_samples), glrt_scan_statistic(p, q), trials, seed, H0, threads)


def empirical_false_alarm(p: int, q: int, n_samples: int, cfar_rate: float, trials: int, seed: int,
                          ar_coeffs=None, threads: Optional[int] = None) -> FalseAlarmEstimate:
    """Exceedance frequency of the CFAR threshold on stationary AR(p) records."""
    if trials < MIN_FALSE_ALARM_TRIALS:
        raise InvalidArgument(
            f"false-alarm estimation needs at least {MIN_FALSE_ALARM_TRIALS} trials, got {trials}"
        )
    gamma = cfar_threshold(p, q, cfar_rate)
    stats = null_statistics(p, q, n_samples, trials, seed, ar_coeffs, threads)
    rate = float(np.mean(stats >= gamma))
    return FalseAlarmEstimate(
        rate=rate,
        stderr=float(np.sqrt(rate * (1.0 - rate) / trials)),
        threshold=gamma,
        nominal=cfar_rate,
        trials=trials,
        seed=seed,
        statistics=stats,
    )


def ks_distance(samples, dof: int) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and the chi-squared(dof) CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.ndim != 1 or x.size < MIN_KS_SAMPLES:
        raise InvalidArgument(f"KS distance needs at least {MIN_KS_SAMPLES} samples")
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise InvalidArgument("samples must be finite and nonnegative")
    n = x.size
    cdf = chi2_cdf(dof, x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


# --- resonator scenarios ----------------------------------------------------

def resonator_scenario(n_samples: int, jump: float = 0.0, bandwidth: float = FIG2_BANDWIDTH,
                       omega: float = FIG2_OMEGA, sample_rate: float = FIG2_SAMPLE_RATE,
                       gain: float = 1.0, shape: str = "step") -> Scenario:
    """Resonator whose center frequency is constant, steps up at N/2, or rises and falls.

    ``jump = 0`` gives the stationary null of the same family.
    """
    if shape not in ("step", "tent"):
        raise InvalidArgument(f"unknown trajectory shape {shape!r}")
    params = {"n_samples": n_samples, "jump_rad": jump, "bandwidth_hz": bandwidth,
              "omega_rad": omega, "sample_rate": sample_rate, "gain": gain,
              "shape": shape if jump else "constant"}
    if jump == 0.0:
        def gen(seed):
            return resonator_signal(ResonatorSpec(n_samples, sample_rate, omega, bandwidth, gain, seed))
        sid = f"resonator-const-N{n_samples}-B{bandwidth:g}-w{omega:.6f}"
    elif shape == "step":
        def gen(seed):
            return resonator_signal(
                ResonatorSpec.step(n_samples, sample_rate, omega, jump, bandwidth, gain, seed)
            )
        sid = f"resonator-step-N{n_samples}-d{jump:.6f}-B{bandwidth:g}-w{omega:.6f}"
    else:
        def gen(seed):
            return resonator_signal(
                ResonatorSpec.tent(n_samples, sample_rate, omega, jump, bandwidth, gain, seed)
            )
        sid = f"resonator-tent-N{n_samples}-d{jump:.6f}-B{bandwidth:g}-w{omega:.6f}"
    return Scenario(sid, gen, params)


def fig2_grid(trials: int, seed: int, deltas: Sequence[float] = FIG2_DELTAS,
              lengths: Sequence[int] = FIG2_LENGTHS, p: int = 2, q: int = 4,
              bandwidth: float = FIG2_BANDWIDTH, omega: float = FIG2_OMEGA,
              threads: Optional[int] = None) -> Dict[tuple, RocCurve]:
    """ROC curves of the GLRT for every (jump, length) pair of a step-resonator grid.

    The null draws for each length are shared by all jump sizes at that length.
    """
    if trials < MIN_ROC_TRIALS:
        raise InvalidArgument(f"ROC estimation needs at least {MIN_ROC_TRIALS} trials, got {trials}")
    stat = glrt_scan_statistic(p, q)
    curves = {}
    for n in lengths:
        null = resonator_scenario(n, 0.0, bandwidth, omega)
        s0 = draw_statistics(null, stat, trials, seed, H0, threads)
        for d in deltas:
            alt = resonator_scenario(n, d, bandwidth, omega)
            s1 = draw_statistics(alt, stat, trials, seed, H1, threads)
            meta = {"h0": null.describe(), "h1": alt.describe(), "p": p, "q": q,
                    "trials": trials, "seed": seed}
            curves[(d, n)] = roc_from_statistics(s0, s1, seed=seed, scenario=meta)
    return curves


def overfitting_study(trials: int, seed: int, fit_orders: Sequence[tuple] = ((2, 2), (4, 2), (6, 2), (2, 4), (2, 8)),
                      n_samples: int = 100, jump: float = 7 * np.pi / 80,
                      bandwidth: float = FIG2_BANDWIDTH, alarm_rate: float = 0.05,
                      threads: Optional[int] = None) -> Dict[tuple, float]:
    """Detection rate at a CFAR level for several fitted ``(p, q)`` on one data set.

    The signals (true order 2) are the same for every fitted order, so
    differences reflect the model order alone.
    """
    alt = resonator_scenario(n_samples, jump, bandwidth)
    signals = _map(lambda k: alt.generate(trial_seed(seed, alt.scenario_id, H1, k)), range(trials), threads)
    out = {}
    for p, q in fit_orders:
        stat = glrt_scan_statistic(p, q)
        gamma = cfar_threshold(p, q, alarm_rate)
        t = np.array(_map(stat, signals, threads))
        out[(p, q)] = float(np.mean(t >= gamma))
    return out


@dataclass(frozen=True)
class BrandtComparison:
    glrt: RocCurve
    brandt: RocCurve
    argmax_r: np.ndarray
    admissible: tuple

    def outer_decile_mass(self) -> float:
        """Fraction of H1 argmax split indices in the first or last tenth of the admissible range."""
        lo, hi = self.admissible
        span = hi - lo
        r = self.argmax_r
        return float(np.mean((r < lo + 0.1 * span) | (r >= hi - 0.1 * span)))


def brandt_comparison(h0: Scenario, h1: Scenario, p: int, q: int, trials: int, seed: int,
                      threads: Optional[int] = None) -> BrandtComparison:
    """GLRT and Brandt ROC curves computed on the same draws."""
    if trials < MIN_ROC_TRIALS:
        raise InvalidArgument(f"ROC estimation needs at least {MIN_ROC_TRIALS} trials, got {trials}")
    glrt = glrt_scan_statistic(p, q)

    def both(x):
        b = brandt_statistic(x, p)
        return glrt(x), b.statistic, b.argmax_r

    res = {}
    for hyp, sc in ((H0, h0), (H1, h1)):
        xs = _map(lambda k: sc.generate(trial_seed(seed, sc.scenario_id, hyp, k)), range(trials), threads)
        res[hyp] = np.array(_map(both, xs, threads))
    meta = {"h0": h0.describe(), "h1": h1.describe(), "p": p, "q": q, "trials": trials, "seed": seed}
    n = len(h1.generate(0))
    return BrandtComparison(
        glrt=roc_from_statistics(res[H0][:, 0], res[H1][:, 0], seed, {**meta, "statistic": "glrt"}),
        brandt=roc_from_statistics(res[H0][:, 1], res[H1][:, 1], seed, {**meta, "statistic": "brandt"}),
        argmax_r=res[H1][:, 2].astype(int),
        admissible=(2 * p + 1, n - 2 * p),
    )


# --- windowing study ----------------------------------------------------------

# frozen-time AR(2) part: resonator pole pair at radius 0.95, angle pi/4
WINDOWING_AR = np.array([2 * 0.95 * np.cos(np.pi / 4), -0.95**2])
# Legendre terms (rows j = 1, 2) added under H1
WINDOWING_TV = np.array([[0.12, 0.0], [0.0, 0.04]])


@dataclass(frozen=True)
class WindowingReport:
    covariance: RocCurve
    autocorrelation: RocCurve
    hamming: RocCurve
    null_autocorrelation: np.ndarray
    null_hamming: np.ndarray
    ks_statistic: float
    ks_pvalue: float
    params: dict

    def histograms(self, bins: int = 40):
        """Shared-bin histograms of the two autocorrelation null statistics."""
        both = np.concatenate([self.null_autocorrelation, self.null_hamming])
        edges = np.histogram_bin_edges(both, bins=bins)
        h_rect, _ = np.histogram(self.null_autocorrelation, bins=edges)
        h_ham, _ = np.histogram(self.null_hamming, bins=edges)
        return edges, h_rect, h_ham


def windowing_study(p: int = 3, q_true: int = 2, n_samples: int = 196, trials: int = 5000,
                    seed: int = 0, q_fit: Optional[int] = None, ar=WINDOWING_AR,
                    tv=WINDOWING_TV, threads: Optional[int] = None) -> WindowingReport:
    """Covariance vs. autocorrelation (rectangular and Hamming) GLRT statistics.

    TVAR(2) records of ``n_samples`` samples are drawn with constant
    coefficients ``ar`` under H0 and with the Legendre terms ``tv`` added
    under H1.  All three statistics are computed with order-``p`` fits (the
    extra order absorbs the end effects of windowing) and ``q_fit``
    (default ``q_true``) basis functions.
    """
    if trials < MIN_WINDOWING_TRIALS:
        raise InvalidArgument(
            f"the windowing study needs at least {MIN_WINDOWING_TRIALS} trials, got {trials}"
        )
    q_fit = q_true if q_fit is None else q_fit
    tv = np.asarray(tv, dtype=float)
    if tv.shape != (q_true, 2):
        raise InvalidArgument(f"tv must have shape ({q_true}, 2)")
    true_basis = make_basis(BasisKind.LEGENDRE, q_true, n_samples)
    fit_basis = make_basis(BasisKind.LEGENDRE, q_fit, n_samples)
    alpha1 = np.concatenate([np.asarray(ar, dtype=float), tv.reshape(-1)])
    alpha0 = np.concatenate([np.asarray(ar, dtype=float), np.zeros(2 * q_true)])
    ham = np.hamming(n_samples)
    sid = f"windowing-N{n_samples}-p{p}-q{q_true}"
    params = {"n_samples": n_samples, "p_fit": p, "q_true": q_true, "q_fit": q_fit,
              "alpha_h0": alpha0.tolist(), "alpha_h1": alpha1.tolist(), "trials": trials, "seed": seed}

    def stats(alpha, hyp):
        def one(k):
            x = simulate_tvar(alpha, true_basis, 2, 1.0, trial_seed(seed, sid, hyp, k))
            return (
                glrt_statistic(x, p, fit_basis).statistic,
                glrt_statistic_autocorrelation(x, p, fit_basis).statistic,
                glrt_statistic_autocorrelation(x, p, fit_basis, window=ham).statistic,
            )
        return np.array(_map(one, range(trials), threads))

    s0 = stats(alpha0, H0)
    s1 = stats(alpha1, H1)
    curves = [
        roc_from_statistics(s0[:, k], s1[:, k], seed, {**params, "statistic": name})
        for k, name in enumerate(("covariance", "autocorrelation", "autocorrelation-hamming"))
    ]
    ks = scipy.stats.ks_2samp(s0[:, 1], s0[:, 2])
    return WindowingReport(
        covariance=curves[0],
        autocorrelation=curves[1],
        hamming=curves[2],
        null_autocorrelation=s0[:, 1],
        null_hamming=s0[:, 2],
        ks_statistic=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        params=params,
    )
