"""Command-line interface.

Subcommands: ``synth``, ``glrt``, ``detect``, ``roc``, ``calibrate``,
``windowing-study`` and ``segments``.  Every CSV written starts with a
comment line holding the tool version, the full flag set and the seed.

Exit codes: 0 success (or H0 retained), 10 H1 declared, 2 usage error,
3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import re
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import brandt_statistic
from .basis import BasisKind, make_basis
from .detectors import (
    DetectorConfig,
    detect_formant_changes,
    detect_gci,
    detect_gci_periodic,
    detect_goi,
    detect_goi_wmg,
)
from .errors import (
    DataError,
    DimensionMismatch,
    InsufficientData,
    InvalidArgument,
    InvalidPitchPeriod,
    ScenarioFailure,
    TvarError,
    ZeroEnergy,
)
from .evaluation import (
    FIG2_BANDWIDTH,
    FIG2_OMEGA,
    H0,
    H1,
    MIN_FALSE_ALARM_TRIALS,
    MIN_ROC_TRIALS,
    MIN_WINDOWING_TRIALS,
    auc,
    brandt_comparison,
    draw_statistics,
    empirical_false_alarm,
    fig2_grid,
    glrt_scan_statistic,
    ks_distance,
    resonator_scenario,
    roc_from_statistics,
    windowing_study,
)
from .glrt import cfar_threshold, glrt_statistic, glrt_statistic_autocorrelation
from .io import MARKER_COLUMNS, decimate, marker_rows, read_signal, write_signal, write_table
from .synth import ImpulseTrain, ResonatorSpec, WhiteNoise, formant_speech, resonator_signal

EXIT_OK = 0
EXIT_DETECTION = 10
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

TOOL = "tvarglrt"

_ANGLE = re.compile(r"^\s*([+-]?)(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$", re.IGNORECASE)


class UsageError(Exception):
    pass


# --- flag types -------------------------------------------------------------

def parse_angle(text: str) -> float:
    """Parse ``a*pi/b`` style angles (``7pi/80``, ``-pi/4``, ``0.5pi``) or a plain float."""
    m = _ANGLE.match(text)
    if m:
        sign, num, den = m.groups()
        a = float(num) if num not in ("", ".") else 1.0
        b = float(den) if den else 1.0
        if b == 0:
            raise argparse.ArgumentTypeError(f"zero denominator in angle {text!r}")
        v = a * math.pi / b
        return -v if sign == "-" else v
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use e.g. 7pi/80 or 0.27)") from None


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def nonnegative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {v}")
    return v


def seed_value(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def formant_list(text: str):
    """``"730:90,1090:110"`` -> ``[(730.0, 90.0), (1090.0, 110.0)]`` (Hz)."""
    out = []
    for item in text.split(","):
        try:
            f, b = item.split(":")
            out.append((float(f), float(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"formants must look like 730:90,1090:110; got {text!r}"
            ) from None
    return out


# --- shared helpers ---------------------------------------------------------

# flags that never change the numbers written
_UNRECORDED = ("func", "command", "out", "threads")


def _flags(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _UNRECORDED:
            continue
        if isinstance(v, Path):
            v = str(v)
        elif isinstance(v, list):
            v = [list(t) if isinstance(t, tuple) else t for t in v]
        out[k.replace("_", "-")] = v
    return out


def header_comment(args) -> str:
    seed = getattr(args, "seed", None)
    return (f"{TOOL} {__version__} {args.command} "
            f"flags={json.dumps(_flags(args), sort_keys=True)} seed={seed}")


@contextlib.contextmanager
def _output(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _threads(args):
    return args.threads if args.threads else (os.cpu_count() or 1)


def _check_trials(trials, minimum, what):
    if trials < minimum:
        raise UsageError(f"{what} needs --trials >= {minimum}, got {trials}")


def _load(args):
    sig = read_signal(args.input, getattr(args, "fs", None), getattr(args, "format", None))
    x, fs = sig.samples, sig.sample_rate
    factor = getattr(args, "decimate", 1)
    if factor > 1:
        x = decimate(x, factor)
        fs = fs / factor
    return x, fs


def _read_indices(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    try:
        vals = np.loadtxt(path, comments="#", ndmin=1)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if vals.ndim != 1 or np.any(vals != np.round(vals)) or np.any(vals < 0):
        raise DataError(f"{path}: expected one nonnegative sample index per line")
    idx = vals.astype(int)
    if np.any(np.diff(idx) <= 0):
        raise DataError(f"{path}: anchors must be strictly increasing")
    return idx


# --- subcommands -------------------------------------------------------------

def cmd_synth(args) -> int:
    if args.formant_speech:
        if args.formants is None:
            raise UsageError("--formant-speech needs --formants")
        formants = args.formants
        if args.formants_end is not None:
            if len(args.formants_end) != len(formants):
                raise UsageError("--formants-end must list as many formants as --formants")
            start = args.ramp_start if args.ramp_start is not None else 0
            if not 0 <= start < args.n:
                raise UsageError("--ramp-start must lie inside the record")
            t = np.zeros(args.n)
            t[start:] = np.arange(args.n - start) / max(args.n - start - 1, 1)
            formants = [(f0 + t * (f1 - f0), b0 + t * (b1 - b0))
                        for (f0, b0), (f1, b1) in zip(formants, args.formants_end)]
        excitation = WhiteNoise() if args.excitation == "noise" else ImpulseTrain(args.f0, args.impulse_offset)
        x = formant_speech(formants, excitation, args.fs, args.n, seed=args.seed, gain=args.gain)
        spec = {"kind": "formant-speech", "formants": args.formants, "formants_end": args.formants_end,
                "ramp_start": args.ramp_start, "excitation": args.excitation, "f0": args.f0,
                "impulse_offset": args.impulse_offset, "n_samples": args.n, "sample_rate": args.fs,
                "gain": args.gain}
    else:
        if args.shape == "tent":
            rs = ResonatorSpec.tent(args.n, args.fs, args.omega, args.jump, args.bandwidth,
                                    args.gain, args.seed, args.burn_in)
        else:
            rs = ResonatorSpec.step(args.n, args.fs, args.omega, args.jump, args.bandwidth,
                                    args.gain, args.seed, args.jump_at, args.burn_in)
        x = resonator_signal(rs)
        spec = {"kind": "resonator", "shape": args.shape, "omega_rad": args.omega, "jump_rad": args.jump,
                "jump_at": args.n // 2 if args.jump_at is None else args.jump_at,
                "bandwidth_hz": args.bandwidth, "gain": args.gain, "burn_in": args.burn_in,
                "n_samples": args.n, "sample_rate": args.fs}

    out = Path(args.out)
    wav_gain = 1.0
    fmt = args.format or ("wav" if out.suffix.lower() == ".wav" else "csv")
    if fmt == "wav":
        peak = float(np.max(np.abs(x))) if x.size else 0.0
        if peak > 0:
            wav_gain = args.wav_peak / peak
        x = x * wav_gain
    write_signal(out, x, args.fs, fmt, header=header_comment(args))
    meta = {"tool": TOOL, "version": __version__, "command": "synth", "flags": _flags(args),
            "seed": args.seed, "format": fmt, "wav_gain": wav_gain, "spec": spec}
    sidecar = out.with_name(out.name + ".json")
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    print(f"wrote {out} ({x.size} samples) and {sidecar}", file=sys.stderr)
    return EXIT_OK


def cmd_glrt(args) -> int:
    x, _ = _load(args)
    basis = make_basis(args.basis, args.q, x.size)
    if args.method == "covariance":
        if args.window != "none":
            raise UsageError("--window applies only to --method autocorrelation")
        res = glrt_statistic(x, args.p, basis)
    else:
        window = np.hamming(x.size) if args.window == "hamming" else None
        res = glrt_statistic_autocorrelation(x, args.p, basis, window)
    gamma = cfar_threshold(args.p, args.q, args.cfar)
    h1 = res.statistic >= gamma
    print(f"T={res.statistic:.10g} dof={res.dof} gamma={gamma:.10g} "
          f"decision={'H1' if h1 else 'H0'}")
    return EXIT_DETECTION if h1 else EXIT_OK


def _detector_config(args, fs):
    factory = {"formant": DetectorConfig.formant, "goi": DetectorConfig.goi,
               "gci": DetectorConfig.gci}[args.mode]
    kw = {"basis_kind": BasisKind(args.basis)}
    for name in ("window_samples", "p", "q"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    if args.cfar is not None:
        kw["cfar_rate"] = args.cfar
    return factory(sample_rate=fs, **kw)


def cmd_detect(args) -> int:
    if args.mode == "goi" and args.gci_anchors is None:
        raise UsageError("--mode goi requires --gci-anchors")
    if args.mode == "goi" and args.statistic == "wmg" and args.eta_threshold is None:
        raise UsageError("--statistic wmg requires --eta-threshold")
    x, fs = _load(args)
    cfg = _detector_config(args, fs)
    events = []
    if args.mode == "formant":
        res = detect_formant_changes(x, cfg)
        for k in np.flatnonzero(res.flags):
            events.append((int(res.segment_boundaries[k + 1]), float(res.statistic_trace[k]),
                           res.threshold, "change"))
    elif args.mode == "goi":
        anchors = _read_indices(args.gci_anchors)
        if args.decimate > 1:
            anchors = np.round(anchors / args.decimate).astype(int)
        if anchors.size < 2:
            raise DataError("--gci-anchors needs at least two closures")
        if anchors[-1] > x.size:
            raise DataError(f"anchor {anchors[-1]} lies beyond the {x.size}-sample record")
        for g1, g2 in zip(anchors[:-1], anchors[1:]):
            if args.statistic == "wmg":
                d = detect_goi_wmg(x, g1, g2, cfg, args.eta_threshold)
            else:
                d = detect_goi(x, g1, g2, cfg)
            if d.missed:
                peak = float(np.max(d.trace)) if d.trace.size else math.nan
                events.append((int(g1), peak, d.threshold, "miss"))
            else:
                events.append((d.index, d.statistic, d.threshold, "goi"))
    else:
        if args.period is not None:
            for d in detect_gci_periodic(x, cfg, args.period, args.offset):
                events.append((d.index, d.statistic, None, "gci"))
        else:
            d = detect_gci(x, cfg)
            events.append((d.index, d.statistic, None, "gci"))
    with _output(args.out) as fh:
        write_table(fh, header_comment(args), MARKER_COLUMNS, marker_rows(events, fs))
    return EXIT_OK


ROC_COLUMNS = ("curve", "statistic", "jump_rad", "n_samples", "auc", "false_alarm", "detection")


def _roc_rows(label, stat_name, jump, n, curve):
    a = auc(curve)
    for fa, pd in curve.points:
        yield (label, stat_name, jump, n, a, fa, pd)


def cmd_roc(args) -> int:
    _check_trials(args.trials, MIN_ROC_TRIALS, "ROC estimation")
    threads = _threads(args)
    rows = []
    if args.fig2_grid:
        curves = fig2_grid(args.trials, args.seed, p=args.p, q=args.q, bandwidth=args.bandwidth,
                           omega=args.omega, threads=threads)
        for (d, n), c in curves.items():
            k = round(d * 80 / math.pi)
            rows.extend(_roc_rows(f"d{k}pi/80-N{n}", "glrt", d, n, c))
    else:
        if args.n is None or args.jump is None:
            raise UsageError("roc needs --fig2-grid or both --n and --jump")
        h0 = resonator_scenario(args.n, 0.0, args.bandwidth, args.omega, args.fs)
        h1 = resonator_scenario(args.n, args.jump, args.bandwidth, args.omega, args.fs,
                                shape=args.shape)
        if args.statistic == "both":
            cmp = brandt_comparison(h0, h1, args.p, args.q, args.trials, args.seed, threads)
            rows.extend(_roc_rows("glrt", "glrt", args.jump, args.n, cmp.glrt))
            rows.extend(_roc_rows("brandt", "brandt", args.jump, args.n, cmp.brandt))
        else:
            if args.statistic == "brandt":
                p = args.p
                stat = lambda x: brandt_statistic(x, p).statistic  # noqa: E731
            else:
                stat = glrt_scan_statistic(args.p, args.q)
            s0 = draw_statistics(h0, stat, args.trials, args.seed, H0, threads)
            s1 = draw_statistics(h1, stat, args.trials, args.seed, H1, threads)
            c = roc_from_statistics(s0, s1, args.seed)
            rows.extend(_roc_rows(args.statistic, args.statistic, args.jump, args.n, c))
    with _output(args.out) as fh:
        write_table(fh, header_comment(args), ROC_COLUMNS, rows)
    return EXIT_OK


CALIBRATION_COLUMNS = ("p", "q", "n_samples", "nominal_rate", "threshold", "empirical_rate",
                       "stderr", "ks_distance", "trials")


def cmd_calibrate(args) -> int:
    _check_trials(args.trials, MIN_FALSE_ALARM_TRIALS, "calibration")
    est = empirical_false_alarm(args.p, args.q, args.n, args.rate, args.trials, args.seed,
                                threads=_threads(args))
    ks = ks_distance(est.statistics, args.p * args.q)
    row = (args.p, args.q, args.n, args.rate, est.threshold, est.rate, est.stderr, ks, args.trials)
    with _output(args.out) as fh:
        write_table(fh, header_comment(args), CALIBRATION_COLUMNS, [row])
    return EXIT_OK


WINDOWING_COLUMNS = ("section", "statistic", "x", "y")


def cmd_windowing(args) -> int:
    _check_trials(args.trials, MIN_WINDOWING_TRIALS, "the windowing study")
    rep = windowing_study(args.p, args.q_true, args.n, args.trials, args.seed,
                          threads=_threads(args))
    rows = []
    named = (("covariance", rep.covariance), ("autocorrelation", rep.autocorrelation),
             ("autocorrelation-hamming", rep.hamming))
    for name, c in named:
        rows.append(("auc", name, auc(c), None))
    rows.append(("ks", "autocorrelation-vs-hamming-h0", rep.ks_statistic, rep.ks_pvalue))
    for name, c in named:
        rows.extend(("roc", name, fa, pd) for fa, pd in c.points)
    edges, h_rect, h_ham = rep.histograms(args.bins)
    for name, h in (("autocorrelation", h_rect), ("autocorrelation-hamming", h_ham)):
        rows.extend(("histogram-h0", name, e, int(v)) for e, v in zip(edges[:-1], h))
    with _output(args.out) as fh:
        write_table(fh, header_comment(args), WINDOWING_COLUMNS, rows)
    return EXIT_OK


SEGMENT_COLUMNS = ("label", "segments", "skipped", "mean_statistic", "std_statistic")


def _read_labels(path, fs, units):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    out = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 'start end label'")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: start and end must be numbers") from None
        if units == "seconds":
            a, b = a * fs, b * fs
        out.append((int(round(a)), int(round(b)), parts[2]))
    return out


def cmd_segments(args) -> int:
    x, fs = _load(args)
    labels = _read_labels(args.labels, fs * args.decimate, args.label_units)
    stats = defaultdict(list)
    skipped = defaultdict(int)
    for a, b, name in labels:
        if args.decimate > 1:
            a, b = a // args.decimate, b // args.decimate
        seg = x[max(a, 0) : min(b, x.size)]
        try:
            t = glrt_statistic(seg, args.p, make_basis(args.basis, args.q, seg.size)).statistic
        except (InsufficientData, ZeroEnergy, DimensionMismatch, np.linalg.LinAlgError):
            skipped[name] += 1
            continue
        stats[name].append(t)
    rows = []
    for name in sorted(set(stats) | set(skipped)):
        v = np.asarray(stats[name])
        mean = float(v.mean()) if v.size else None
        std = float(v.std(ddof=1)) if v.size > 1 else None
        rows.append((name, v.size, skipped[name], mean, std))
    with _output(args.out) as fh:
        write_table(fh, header_comment(args), SEGMENT_COLUMNS, rows)
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _add_input(sp):
    sp.add_argument("input", help="WAV (16-bit PCM mono) or one-sample-per-line CSV")
    sp.add_argument("--fs", type=positive_float, help="sample rate in Hz (required for CSV)")
    sp.add_argument("--format", choices=("wav", "csv"), help="override the extension-based format")
    sp.add_argument("--decimate", type=positive_int, default=1,
                    help="integer downsampling factor applied after reading")


def _add_model(sp, p=2, q=4):
    sp.add_argument("--p", type=positive_int, default=p, help=f"AR order (default {p})")
    sp.add_argument("--q", type=positive_int, default=q, help=f"number of nonconstant basis functions (default {q})")
    sp.add_argument("--basis", choices=[k.value for k in BasisKind], default="legendre")


def _add_threads(sp):
    sp.add_argument("--threads", type=positive_int, default=None,
                    help="worker threads for Monte-Carlo trials (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="TVAR GLRT nonstationarity detection")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="write a synthetic signal and a JSON sidecar")
    kind = sp.add_mutually_exclusive_group()
    kind.add_argument("--resonator", action="store_true", help="noise-driven AR(2) resonator (default)")
    kind.add_argument("--formant-speech", action="store_true", help="cascade of formant resonators")
    sp.add_argument("--n", type=positive_int, required=True, help="number of samples")
    sp.add_argument("--fs", type=positive_float, default=16000.0)
    sp.add_argument("--seed", type=seed_value, required=True)
    sp.add_argument("--out", required=True, help="output path (.wav or .csv)")
    sp.add_argument("--format", choices=("wav", "csv"))
    sp.add_argument("--wav-peak", type=probability, default=0.9,
                    help="WAV output is scaled to this peak magnitude (gain saved in the sidecar)")
    sp.add_argument("--gain", type=float, default=1.0, help="excitation scale")
    sp.add_argument("--omega", type=parse_angle, default=FIG2_OMEGA,
                    help="resonator center frequency in rad/sample (default pi/4)")
    sp.add_argument("--jump", type=parse_angle, default=0.0,
                    help="frequency jump in rad/sample, e.g. 7pi/80")
    sp.add_argument("--jump-at", type=nonnegative_int, help="sample of the step (default N/2)")
    sp.add_argument("--shape", choices=("step", "tent"), default="step")
    sp.add_argument("--bandwidth", type=positive_float, default=100.0, help="resonator bandwidth in Hz")
    sp.add_argument("--burn-in", type=nonnegative_int, default=0)
    sp.add_argument("--formants", type=formant_list, help="freq:bw pairs in Hz, e.g. 730:90,1090:110")
    sp.add_argument("--formants-end", type=formant_list,
                    help="formant targets reached at the end of a linear ramp")
    sp.add_argument("--ramp-start", type=nonnegative_int, help="sample where the formant ramp begins")
    sp.add_argument("--excitation", choices=("noise", "impulse"), default="noise")
    sp.add_argument("--f0", type=positive_float, default=100.0, help="impulse-train rate in Hz")
    sp.add_argument("--impulse-offset", type=nonnegative_int, default=0)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("glrt", help="test one record for nonstationarity")
    _add_input(sp)
    _add_model(sp)
    sp.add_argument("--cfar", type=probability, default=0.05, help="false-alarm rate (default 0.05)")
    sp.add_argument("--method", choices=("covariance", "autocorrelation"), default="covariance")
    sp.add_argument("--window", choices=("none", "hamming"), default="none")
    sp.set_defaults(func=cmd_glrt)

    sp = sub.add_parser("detect", help="formant change, glottal opening or glottal closure markers")
    _add_input(sp)
    sp.add_argument("--mode", choices=("formant", "goi", "gci"), required=True)
    sp.add_argument("--window-samples", type=positive_int, help="N0 (default depends on mode)")
    sp.add_argument("--p", type=positive_int)
    sp.add_argument("--q", type=positive_int)
    sp.add_argument("--basis", choices=[k.value for k in BasisKind], default="legendre")
    sp.add_argument("--cfar", type=probability)
    sp.add_argument("--gci-anchors", help="file of glottal closure sample indices (goi mode)")
    sp.add_argument("--statistic", choices=("glrt", "wmg"), default="glrt",
                    help="goi mode: GLRT or normalized prediction error")
    sp.add_argument("--eta-threshold", type=float, help="trigger level for --statistic wmg")
    sp.add_argument("--period", type=positive_int, help="gci mode: one closure per block of this many samples")
    sp.add_argument("--offset", type=nonnegative_int, default=0, help="gci mode: first block start")
    sp.add_argument("--out", help="markers CSV (default stdout)")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("roc", help="Monte-Carlo ROC curves on resonator scenarios")
    sp.add_argument("--fig2-grid", action="store_true",
                    help="jumps {1,3,5,7}pi/80 by lengths {80,240,400,560}")
    sp.add_argument("--n", type=positive_int)
    sp.add_argument("--jump", type=parse_angle)
    sp.add_argument("--shape", choices=("step", "tent"), default="step")
    sp.add_argument("--bandwidth", type=positive_float, default=FIG2_BANDWIDTH)
    sp.add_argument("--omega", type=parse_angle, default=FIG2_OMEGA)
    sp.add_argument("--fs", type=positive_float, default=16000.0)
    sp.add_argument("--p", type=positive_int, default=2)
    sp.add_argument("--q", type=positive_int, default=4)
    sp.add_argument("--statistic", choices=("glrt", "brandt", "both"), default="glrt")
    sp.add_argument("--trials", type=positive_int, default=1000)
    sp.add_argument("--seed", type=seed_value, required=True)
    sp.add_argument("--out")
    _add_threads(sp)
    sp.set_defaults(func=cmd_roc)

    sp = sub.add_parser("calibrate", help="empirical false-alarm rate of the CFAR threshold")
    sp.add_argument("--p", type=positive_int, default=2)
    sp.add_argument("--q", type=positive_int, default=4)
    sp.add_argument("--n", type=positive_int, default=1600)
    sp.add_argument("--rate", type=probability, default=0.05)
    sp.add_argument("--trials", type=positive_int, default=2000)
    sp.add_argument("--seed", type=seed_value, required=True)
    sp.add_argument("--out")
    _add_threads(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("windowing-study", help="covariance vs. windowed autocorrelation statistics")
    sp.add_argument("--p", type=positive_int, default=3, help="fitted AR order")
    sp.add_argument("--q-true", type=positive_int, default=2)
    sp.add_argument("--n", type=positive_int, default=196)
    sp.add_argument("--trials", type=positive_int, default=5000)
    sp.add_argument("--bins", type=positive_int, default=40)
    sp.add_argument("--seed", type=seed_value, required=True)
    sp.add_argument("--out")
    _add_threads(sp)
    sp.set_defaults(func=cmd_windowing)

    sp = sub.add_parser("segments", help="average the statistic over labeled segments")
    _add_input(sp)
    _add_model(sp, p=4, q=2)
    sp.add_argument("--labels", required=True, help="lines of 'start end label'")
    sp.add_argument("--label-units", choices=("seconds", "samples"), default="seconds")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_segments)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InsufficientData, DimensionMismatch, ZeroEnergy, InvalidPitchPeriod,
            OSError) as exc:
        print(f"{TOOL}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgument as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioFailure, TvarError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"{TOOL}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
