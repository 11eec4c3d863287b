"""Synthetic test signals with known ground truth.

All generators start from zero initial conditions and draw excitation from
``numpy.random.default_rng(seed)``, so output is a pure function of the
arguments.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.signal

from .basis import BasisSet, eval_trajectories
from .errors import InvalidArgument, UnstableTrajectoryWarning


def _as_trajectory(value, n, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise InvalidArgument(f"{name} must be a scalar or have length {n}")
    return arr


def pole_radius(bandwidth, sample_rate):
    """Resonator pole radius ``exp(-pi * B / fs)`` for a bandwidth in Hz."""
    return np.exp(-np.pi * np.asarray(bandwidth, dtype=float) / sample_rate)


def resonator_coefficients(center_freq, bandwidth, sample_rate):
    """AR(2) coefficients ``(2 rho cos w, -rho^2)`` per sample, shape ``(N, 2)``."""
    rho = pole_radius(bandwidth, sample_rate)
    w = np.asarray(center_freq, dtype=float)
    return np.column_stack([2.0 * rho * np.cos(w), -(rho**2)])


@dataclass(frozen=True, eq=False)
class ResonatorSpec:
    """Time-varying second-order resonator driven by white Gaussian noise.

    ``center_freq`` is in radians per sample and ``bandwidth`` in Hz; either may
    be a scalar or a length-``n_samples`` trajectory.  ``burn_in`` samples are
    simulated with the initial parameters and discarded.
    """

    n_samples: int
    sample_rate: float
    center_freq: Union[float, np.ndarray]
    bandwidth: Union[float, np.ndarray]
    gain: float = 1.0
    seed: int = 0
    burn_in: int = 0

    def __post_init__(self):
        n = int(self.n_samples)
        if n < 1:
            raise InvalidArgument(f"n_samples must be >= 1, got {self.n_samples}")
        if not self.sample_rate > 0:
            raise InvalidArgument("sample_rate must be positive")
        if self.gain < 0:
            raise InvalidArgument("gain must be >= 0")
        if self.burn_in < 0:
            raise InvalidArgument("burn_in must be >= 0")
        w = _as_trajectory(self.center_freq, n, "center_freq")
        b = _as_trajectory(self.bandwidth, n, "bandwidth")
        if np.any(w <= 0) or np.any(w >= np.pi):
            raise InvalidArgument("center frequency must lie in (0, pi) rad/sample")
        rho = pole_radius(b, self.sample_rate)
        if np.any(rho <= 0) or np.any(rho >= 1):
            raise InvalidArgument("bandwidth must give a pole radius in (0, 1)")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "n_samples", n)
        object.__setattr__(self, "center_freq", w)
        object.__setattr__(self, "bandwidth", b)

    @classmethod
    def step(cls, n_samples, sample_rate, omega, jump, bandwidth=100.0, gain=1.0,
             seed=0, jump_at=None, burn_in=0):
        """Center frequency ``omega`` that increases by ``jump`` at ``jump_at`` (default N/2)."""
        if jump_at is None:
            jump_at = n_samples // 2
        w = np.full(n_samples, float(omega))
        w[jump_at:] += jump
        return cls(n_samples, sample_rate, w, bandwidth, gain, seed, burn_in)

    @classmethod
    def tent(cls, n_samples, sample_rate, omega, rise, bandwidth=100.0, gain=1.0,
             seed=0, burn_in=0):
        """Center frequency rising linearly by ``rise`` to mid-record, then falling back."""
        t = np.arange(n_samples) / max(n_samples - 1, 1)
        w = omega + rise * (1.0 - np.abs(2.0 * t - 1.0))
        return cls(n_samples, sample_rate, w, bandwidth, gain, seed, burn_in)

    def coefficients(self) -> np.ndarray:
        return resonator_coefficients(self.center_freq, self.bandwidth, self.sample_rate)

    def describe(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "sample_rate": self.sample_rate,
            "center_freq": self.center_freq.tolist(),
            "bandwidth": self.bandwidth.tolist(),
            "gain": self.gain,
            "seed": self.seed,
            "burn_in": self.burn_in,
        }


def tv_ar_filter(coeffs, drive, past=None) -> np.ndarray:
    """Run ``y[n] = sum_i coeffs[n, i-1] y[n-i] + drive[n]``.

    ``past`` holds ``(y[-p], ..., y[-1])`` in time order (zeros by default).
    Stretches with constant coefficients are delegated to ``lfilter``.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    drive = np.asarray(drive, dtype=float)
    n, p = coeffs.shape
    if drive.shape != (n,):
        raise InvalidArgument("drive length must match coefficient rows")
    hist = np.zeros(p) if past is None else np.asarray(past, dtype=float)
    if hist.shape != (p,):
        raise InvalidArgument(f"past must hold {p} samples")
    y = np.empty(n)
    if n == 0:
        return y
    change = np.flatnonzero(np.any(coeffs[1:] != coeffs[:-1], axis=1)) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [n]])
    buf = list(hist)
    if len(starts) <= n // 16 + 1:
        for s, e in zip(starts, ends):
            a = np.concatenate([[1.0], -coeffs[s]])
            zi = scipy.signal.lfiltic([1.0], a, np.asarray(buf[::-1][:p]))
            y[s:e], _ = scipy.signal.lfilter([1.0], a, drive[s:e], zi=zi)
            buf = (buf + list(y[s:e]))[-p:]
    else:
        c = coeffs.tolist()
        d = drive.tolist()
        for k in range(n):
            acc = d[k]
            row = c[k]
            for i in range(p):
                acc += row[i] * buf[-1 - i]
            buf.append(acc)
            y[k] = acc
    return y


def resonator_signal(spec: ResonatorSpec) -> np.ndarray:
    """White Gaussian noise filtered by the time-varying resonator of ``spec``.

    ``x[n] = 2 rho[n] cos(w[n]) x[n-1] - rho[n]^2 x[n-2] + gain * w[n]``.
    """
    rng = np.random.default_rng(spec.seed)
    total = spec.burn_in + spec.n_samples
    drive = spec.gain * rng.standard_normal(total)
    coeffs = spec.coefficients()
    if spec.burn_in:
        coeffs = np.vstack([np.repeat(coeffs[:1], spec.burn_in, axis=0), coeffs])
    return tv_ar_filter(coeffs, drive)[spec.burn_in :]


def frozen_time_root_moduli(trajectories) -> np.ndarray:
    """Largest root modulus of ``z^p - a_1 z^(p-1) - ... - a_p`` at each sample."""
    A = np.atleast_2d(np.asarray(trajectories, dtype=float))
    n, p = A.shape
    comp = np.zeros((n, p, p))
    comp[:, 0, :] = A
    if p > 1:
        comp[:, np.arange(1, p), np.arange(p - 1)] = 1.0
    return np.abs(np.linalg.eigvals(comp)).max(axis=1)


def simulate_tvar(alpha, basis: BasisSet, p: int, sigma: float, seed: int,
                  past=None, burn_in: int = 0) -> np.ndarray:
    """Simulate a TVAR(p) process whose coefficients are expanded in ``basis``.

    A :class:`UnstableTrajectoryWarning` is issued if any frozen-time pole lies
    on or outside the unit circle.  ``past`` gives initial samples
    ``(x[-p], ..., x[-1])``.  Burn-in uses the coefficients at ``n = 0``.
    """
    A = eval_trajectories(alpha, basis, p)
    if np.any(frozen_time_root_moduli(A) >= 1.0):
        warnings.warn(
            "TVAR trajectory has frozen-time poles on or outside the unit circle",
            UnstableTrajectoryWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    drive = sigma * rng.standard_normal(burn_in + basis.length)
    if burn_in:
        A = np.vstack([np.repeat(A[:1], burn_in, axis=0), A])
    return tv_ar_filter(A, drive, past=past)[burn_in:]


@dataclass(frozen=True)
class WhiteNoise:
    """Aperiodic excitation (whispered speech)."""


@dataclass(frozen=True)
class ImpulseTrain:
    """Unit impulses every ``round(fs / f0)`` samples, starting at ``offset``."""

    f0: float
    offset: int = 0

    def period(self, sample_rate) -> int:
        if not self.f0 > 0:
            raise InvalidArgument("f0 must be positive")
        return int(round(sample_rate / self.f0))


Excitation = Union[WhiteNoise, ImpulseTrain]


def formant_speech(formants: Sequence, excitation: Excitation, sample_rate: float,
                   n_samples: int, seed: int = 0, gain: float = 1.0) -> np.ndarray:
    """Cascade of second-order formant resonators.

    Parameters
    ----------
    formants : sequence of (frequency, bandwidth)
        Frequencies and bandwidths in Hz, each a scalar or a per-sample trajectory.
    excitation : WhiteNoise or ImpulseTrain
    sample_rate : float
    n_samples : int
    seed : int
        Seeds the white-noise excitation; ignored for impulse trains.
    gain : float
        Excitation scale.
    """
    if not formants:
        raise InvalidArgument("at least one formant is required")
    n = int(n_samples)
    if n < 1:
        raise InvalidArgument("n_samples must be >= 1")
    if isinstance(excitation, WhiteNoise):
        drive = gain * np.random.default_rng(seed).standard_normal(n)
    elif isinstance(excitation, ImpulseTrain):
        drive = np.zeros(n)
        drive[excitation.offset :: excitation.period(sample_rate)] = gain
    else:
        raise InvalidArgument(f"unsupported excitation {excitation!r}")
    y = drive
    for freq, bw in formants:
        w = 2.0 * np.pi * _as_trajectory(freq, n, "formant frequency") / sample_rate
        spec = ResonatorSpec(n, sample_rate, w, bw)
        y = tv_ar_filter(spec.coefficients(), y)
    return y


def rosenberg_flow_derivative(open_length: int, rise_fraction: float = 0.6) -> np.ndarray:
    """Sampled derivative of a Rosenberg glottal flow pulse over one open phase.

    The flow rises as ``(1 - cos)/2`` over ``rise_fraction`` of the open
    phase and falls as a quarter cosine over the rest, so its derivative ends
    with an abrupt return to zero at glottal closure.  The result is
    normalized to a peak magnitude of 1.
    """
    if open_length < 2:
        raise InvalidArgument("open phase must span at least 2 samples")
    if not 0.0 < rise_fraction < 1.0:
        raise InvalidArgument("rise_fraction must lie in (0, 1)")
    t = np.arange(open_length + 1, dtype=float)
    tp = rise_fraction * open_length
    tn = open_length - tp
    flow = np.where(
        t <= tp,
        0.5 * (1.0 - np.cos(np.pi * t / tp)),
        np.cos(0.5 * np.pi * (t - tp) / tn),
    )
    d = np.diff(flow)
    return d / np.max(np.abs(d))


@dataclass(frozen=True)
class GlottalCycleTrain:
    """Synthetic voiced signal with known closure and opening instants.

    Attributes
    ----------
    signal : ndarray
    gci : ndarray
        Sample indices of the excitation impulses (glottal closures).
    goi : ndarray
        Sample indices at which each open phase begins.
    amplitudes : ndarray
        Impulse amplitude of each period.
    """

    signal: np.ndarray
    gci: np.ndarray
    goi: np.ndarray
    amplitudes: np.ndarray


def glottal_cycle_train(n_periods: int, period: int, open_offset: int, sample_rate: float,
                        closed_formants: Sequence, open_formants: Sequence,
                        closed_noise: float, open_noise: float, seed: int,
                        amplitude_range=(1.0, 1.0), lead_in: int = 0,
                        pulse: str = "rosenberg", open_ramp: int = 0) -> GlottalCycleTrain:
    """Formant cascade whose vocal tract changes within each pitch period.

    Each period begins at a glottal closure.  For the first ``open_offset``
    samples the formants are ``closed_formants`` and the excitation is white
    noise of standard deviation ``closed_noise``; from the opening instant to
    the next closure the formants switch to ``open_formants`` and the noise
    to ``open_noise``.  The glottal source is either a unit impulse at each
    closure (``pulse="impulse"``) or a Rosenberg flow derivative spanning
    each open phase (``pulse="rosenberg"``).  Its amplitude is drawn per
    period, log-uniformly from ``amplitude_range``.  ``lead_in`` samples of
    open phase precede the first closure.

    With ``open_ramp > 0`` the formants and noise level move linearly from
    their closed to their open values over the first ``open_ramp`` samples
    of each open phase, mimicking a gradual glottal opening.
    """
    if len(closed_formants) != len(open_formants) or not closed_formants:
        raise InvalidArgument("closed and open phases need the same nonzero number of formants")
    if not 0 < open_offset < period:
        raise InvalidArgument("open_offset must lie strictly inside the period")
    if n_periods < 1:
        raise InvalidArgument("n_periods must be >= 1")
    if not 0 <= open_ramp <= period - open_offset:
        raise InvalidArgument("open_ramp must fit inside the open phase")
    if pulse not in ("impulse", "rosenberg"):
        raise InvalidArgument(f"unknown glottal pulse {pulse!r}")
    rng = np.random.default_rng(seed)
    lo, hi = amplitude_range
    if not 0 < lo <= hi:
        raise InvalidArgument("amplitude_range must satisfy 0 < low <= high")
    amps = np.exp(rng.uniform(np.log(lo), np.log(hi), n_periods))
    n = lead_in + n_periods * period
    gci = lead_in + period * np.arange(n_periods)
    goi = gci + open_offset
    # openness: 0 in the closed phase, 1 in the open phase
    mix = np.ones(n)
    ramp = (np.arange(1, open_ramp + 1) / (open_ramp + 1)) if open_ramp else np.empty(0)
    for g, o in zip(gci, goi):
        mix[g:o] = 0.0
        mix[o : o + open_ramp] = ramp
    drive = rng.standard_normal(n) * (closed_noise + mix * (open_noise - closed_noise))
    if pulse == "impulse":
        drive[gci] += amps
    else:
        # the pulse ending at closure k belongs to period k
        shape = rosenberg_flow_derivative(period - open_offset)
        for g, a in zip(gci, amps):
            start = g - shape.size
            if start >= 0:
                drive[start:g] += a * shape
            else:
                drive[:g] += a * shape[-start:]
    y = drive
    for (fc, bc), (fo, bo) in zip(closed_formants, open_formants):
        freq = fc + mix * (fo - fc)
        bw = bc + mix * (bo - bc)
        y = tv_ar_filter(resonator_coefficients(2 * np.pi * freq / sample_rate, bw, sample_rate), y)
    return GlottalCycleTrain(signal=y, gci=gci, goi=goi, amplitudes=amps)
