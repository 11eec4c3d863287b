import io as _io
import wave

import numpy as np
import pytest
import scipy.signal

from tvarglrt.errors import DataError, InvalidArgument
from tvarglrt.io import (
    MARKER_COLUMNS,
    decimate,
    marker_rows,
    quantize_pcm16,
    read_signal,
    write_csv_signal,
    write_table,
    write_wav,
)


def test_csv_round_trip_is_exact(tmp_path):
    x = np.random.default_rng(0).standard_normal(500) * 1e3
    x[3] = 1 / 3
    write_csv_signal(tmp_path / "x.csv", x, header="test")
    sig = read_signal(tmp_path / "x.csv", sample_rate=8000)
    np.testing.assert_array_equal(sig.samples, x)
    assert sig.sample_rate == 8000


def test_wav_round_trip_exact_after_quantization(tmp_path):
    x = np.random.default_rng(1).uniform(-0.99, 0.99, 1000)
    write_wav(tmp_path / "x.wav", x, 16000)
    y = read_signal(tmp_path / "x.wav").samples
    np.testing.assert_array_equal(y, quantize_pcm16(x) / 32768.0)
    write_wav(tmp_path / "y.wav", y, 16000)
    assert (tmp_path / "x.wav").read_bytes() == (tmp_path / "y.wav").read_bytes()


def test_wav_header_written_as_16bit_mono(tmp_path):
    write_wav(tmp_path / "x.wav", np.zeros(10), 8000)
    with wave.open(str(tmp_path / "x.wav")) as w:
        assert (w.getnchannels(), w.getsampwidth(), w.getframerate(), w.getnframes()) == (1, 2, 8000, 10)


def test_wav_scaling_by_32768(tmp_path):
    with wave.open(str(tmp_path / "h.wav"), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(16000)
        w.writeframes(np.array([-32768, 0, 16384, 32767], dtype="<i2").tobytes())
    np.testing.assert_array_equal(read_signal(tmp_path / "h.wav").samples, [-1.0, 0.0, 0.5, 32767 / 32768])


def test_quantization_saturates():
    np.testing.assert_array_equal(quantize_pcm16([2.0, -2.0, 0.5]), [32767, -32768, 16384])


def test_stereo_and_non16bit_wav_rejected(tmp_path):
    with wave.open(str(tmp_path / "s.wav"), "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(16000)
        w.writeframes(np.zeros(8, dtype="<i2").tobytes())
    with pytest.raises(DataError):
        read_signal(tmp_path / "s.wav")
    with wave.open(str(tmp_path / "b.wav"), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(1)
        w.setframerate(16000)
        w.writeframes(bytes(8))
    with pytest.raises(DataError):
        read_signal(tmp_path / "b.wav")


def test_read_errors(tmp_path):
    with pytest.raises(DataError):
        read_signal(tmp_path / "missing.wav")
    (tmp_path / "x.csv").write_text("1\n2\n")
    with pytest.raises(InvalidArgument):
        read_signal(tmp_path / "x.csv")
    (tmp_path / "bad.csv").write_text("1\nfoo\n")
    with pytest.raises(DataError):
        read_signal(tmp_path / "bad.csv", sample_rate=1)
    with pytest.raises(DataError):
        read_signal(tmp_path / "x.flac", sample_rate=1)


def test_decimate_matches_firwin_filter_and_alignment():
    x = np.random.default_rng(2).standard_normal(400)
    taps = scipy.signal.firwin(63, 0.45 / 2)
    ref = scipy.signal.lfilter(taps, 1.0, np.concatenate([x, np.zeros(31)]))[31:][::2]
    np.testing.assert_allclose(decimate(x, 2), ref, atol=1e-13)
    assert decimate(x, 4).size == 100
    np.testing.assert_array_equal(decimate(x, 1), x)
    with pytest.raises(InvalidArgument):
        decimate(x, 0)


def test_decimate_passes_low_and_stops_high_frequencies():
    n = np.arange(4000)
    fs = 16000
    low = np.sin(2 * np.pi * 500 * n / fs)
    high = np.sin(2 * np.pi * 6000 * n / fs)  # above the new 4 kHz Nyquist
    assert np.std(decimate(low, 2)[100:-100]) == pytest.approx(np.std(low), rel=0.02)
    assert np.std(decimate(high, 2)[100:-100]) < 0.01


def test_marker_table_format():
    buf = _io.StringIO()
    write_table(buf, "tool 1 flags={} seed=3", MARKER_COLUMNS,
                marker_rows([(160, 2.5, 1.0, "goi"), (None, float("nan"), 1.0, "miss")], 16000))
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# tool 1 flags={} seed=3"
    assert lines[1] == "index,time_seconds,statistic,threshold,event_type"
    assert lines[2] == "160,0.01,2.5,1,goi"
    assert lines[3] == ",,nan,1,miss"
