"""Signal and result files: 16-bit PCM WAV, sample-per-line CSV, marker and
table CSVs with a leading comment line.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.io.wavfile
import scipy.signal

from .errors import DataError, InvalidArgument

PCM_SCALE = 32768.0
DECIMATION_TAPS = 63


class SignalFormat(str, enum.Enum):
    WAV16_MONO = "wav"
    CSV = "csv"


@dataclass(frozen=True)
class SignalFile:
    path: Path
    format: SignalFormat
    sample_rate: float
    samples: np.ndarray


def infer_format(path, fmt: Optional[str] = None) -> SignalFormat:
    if fmt:
        return SignalFormat(fmt)
    suffix = Path(path).suffix.lower()
    if suffix == ".wav":
        return SignalFormat.WAV16_MONO
    if suffix in (".csv", ".txt"):
        return SignalFormat.CSV
    raise DataError(f"cannot infer signal format from {path!s}; use a .wav or .csv name")


def read_signal(path, sample_rate: Optional[float] = None, fmt: Optional[str] = None) -> SignalFile:
    """Read a WAV (16-bit PCM mono, scaled by 1/32768) or one-sample-per-line CSV.

    CSV files carry no rate, so ``sample_rate`` must be given for them.
    Lines starting with ``#`` are ignored in CSV input.
    """
    path = Path(path)
    kind = infer_format(path, fmt)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    if kind is SignalFormat.WAV16_MONO:
        try:
            rate, data = scipy.io.wavfile.read(path)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from exc
        if data.dtype != np.int16:
            raise DataError(f"{path}: expected 16-bit PCM, found {data.dtype}")
        if data.ndim != 1:
            raise DataError(f"{path}: expected mono, found {data.shape[1]} channels")
        if sample_rate is not None and float(sample_rate) != float(rate):
            raise DataError(f"{path}: file rate {rate} Hz disagrees with requested {sample_rate} Hz")
        return SignalFile(path, kind, float(rate), data.astype(float) / PCM_SCALE)
    if sample_rate is None:
        raise InvalidArgument("CSV input needs an explicit sample rate")
    try:
        data = np.loadtxt(path, dtype=float, comments="#", ndmin=1)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if data.ndim != 1:
        raise DataError(f"{path}: expected one sample per line")
    return SignalFile(path, kind, float(sample_rate), data)


def quantize_pcm16(x) -> np.ndarray:
    """Round to int16 after scaling by 32768, saturating at the representable range."""
    q = np.round(np.asarray(x, dtype=float) * PCM_SCALE)
    return np.clip(q, -32768, 32767).astype(np.int16)


def write_wav(path, x, sample_rate: float) -> None:
    rate = int(round(sample_rate))
    if rate != sample_rate or rate <= 0:
        raise InvalidArgument("WAV files need a positive integer sample rate")
    scipy.io.wavfile.write(path, rate, quantize_pcm16(x))


def write_csv_signal(path, x, header: Optional[str] = None) -> None:
    """One sample per line with 17 significant digits, so reading back is exact."""
    with open(path, "w", newline="\n") as fh:
        if header:
            fh.write(f"# {header}\n")
        for v in np.asarray(x, dtype=float):
            fh.write(f"{v:.17g}\n")


def write_signal(path, x, sample_rate: float, fmt: Optional[str] = None,
                 header: Optional[str] = None) -> SignalFormat:
    kind = infer_format(path, fmt)
    if kind is SignalFormat.WAV16_MONO:
        write_wav(path, x, sample_rate)
    else:
        write_csv_signal(path, x, header)
    return kind


def decimate(x, factor: int) -> np.ndarray:
    """Integer-factor downsampling after a 63-tap linear-phase low-pass FIR.

    The windowed-sinc (Hamming) filter has its cutoff at 0.45 of the new
    Nyquist frequency; its group delay is removed so output sample ``k``
    corresponds to input sample ``k * factor``.
    """
    if int(factor) != factor or factor < 1:
        raise InvalidArgument("decimation factor must be a positive integer")
    factor = int(factor)
    x = np.asarray(x, dtype=float)
    if factor == 1:
        return x.copy()
    taps = scipy.signal.firwin(DECIMATION_TAPS, 0.45 / factor)
    delay = (DECIMATION_TAPS - 1) // 2
    y = np.convolve(x, taps)[delay : delay + x.size]
    return y[::factor]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def write_table(fh, comment: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with a ``# comment`` first line and a header row; floats use 12 significant digits."""
    fh.write(f"# {comment}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v) for v in row])


MARKER_COLUMNS = ("index", "time_seconds", "statistic", "threshold", "event_type")


def marker_rows(events, sample_rate: float):
    """Rows ``(index, time, statistic, threshold, type)`` from ``(index, statistic, threshold, type)``."""
    for index, stat, thr, kind in events:
        t = None if index is None else index / sample_rate
        yield (index, t, stat, thr, kind)
