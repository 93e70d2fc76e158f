"""
Waveform files, results CSV and JSON summaries.

Floats are written with 9 significant digits in scientific notation so that
repeated runs produce byte-identical files.
"""

import csv
import json
import math
import os
import wave

import numpy as np

from .errors import ParameterError, ParseError, RateMismatchError
from .signals import Waveform

FORMATS = ("csv_float", "wav_pcm16")
RESULTS_HEADER = ["receiver_x", "receiver_y", "receiver_z", "true_distance_m", "estimator",
                  "snr_db", "trial", "estimated_distance_m", "abs_error_m"]
PCM16_SCALE = 32767


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.8e}"


def guess_format(path):
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".wav":
        return "wav_pcm16"
    if ext in (".csv", ".txt"):
        return "csv_float"
    raise ParameterError(f"cannot infer waveform format from {path!r}")


def save_waveform(w, path, fmt=None):
    """Write a mono waveform; wav_pcm16 needs samples within [-1, 1]."""
    fmt = fmt or guess_format(path)
    if fmt == "csv_float":
        with open(path, "w", newline="") as fh:
            fh.write(f"# sample_rate={fmt_float(w.sample_rate)}\n")
            fh.write(f"# t0={fmt_float(w.t0)}\n")
            fh.write(f"# n_samples={len(w)}\n")
            fh.write("sample\n")
            for x in w.samples:
                fh.write(fmt_float(x) + "\n")
    elif fmt == "wav_pcm16":
        if len(w) and np.max(np.abs(w.samples)) > 1.0:
            raise ParameterError("wav_pcm16 samples must lie within [-1, 1]")
        rate = int(round(w.sample_rate))
        if rate != w.sample_rate:
            raise ParameterError("wav_pcm16 requires an integer sample rate")
        codes = np.rint(w.samples * PCM16_SCALE).astype("<i2")
        with wave.open(str(path), "wb") as fh:
            fh.setnchannels(1)
            fh.setsampwidth(2)
            fh.setframerate(rate)
            fh.writeframes(codes.tobytes())
    else:
        raise ParameterError(f"unknown waveform format {fmt!r}")


def _check_rate(found, expected, path):
    if expected is not None and not math.isclose(found, expected, rel_tol=0, abs_tol=1e-9):
        raise RateMismatchError(f"{path}: sample rate {found} != expected {expected}")


def _load_csv(path, sample_rate):
    meta = {}
    samples = []
    try:
        with open(path, newline="") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].partition("=")
                    meta[key.strip()] = val.strip()
                    continue
                if line.lower() == "sample":
                    continue
                try:
                    samples.append(float(line.split(",")[0]))
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: not a number: {line!r}") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not a text file ({exc})") from None
    if "n_samples" in meta and int(meta["n_samples"]) != len(samples):
        raise ParseError(f"{path}: declares {meta['n_samples']} samples, found {len(samples)}")
    if "sample_rate" in meta:
        rate = float(meta["sample_rate"])
        _check_rate(rate, sample_rate, path)
    elif sample_rate is not None:
        rate = sample_rate
    else:
        raise ParseError(f"{path}: no sample_rate in file and none given")
    t0 = float(meta.get("t0", 0.0))
    try:
        return Waveform(np.array(samples), rate, t0)
    except ParameterError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _load_wav(path, sample_rate):
    try:
        with wave.open(str(path), "rb") as fh:
            if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
                raise ParseError(f"{path}: expected mono 16-bit PCM")
            n = fh.getnframes()
            rate = float(fh.getframerate())
            data = fh.readframes(n)
    except (wave.Error, EOFError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    if len(data) != 2 * n:
        raise ParseError(f"{path}: truncated, header declares {n} frames, got {len(data) // 2}")
    _check_rate(rate, sample_rate, path)
    codes = np.frombuffer(data, dtype="<i2").astype(float)
    return Waveform(codes / PCM16_SCALE, rate, 0.0)


def load_waveform(path, fmt=None, sample_rate=None):
    """Read a waveform written by `save_waveform` (or a compatible file).

    Raises
    ------
    ParseError
        Malformed or truncated file.
    RateMismatchError
        The file's sample rate disagrees with `sample_rate`.
    """
    fmt = fmt or guess_format(path)
    if fmt == "csv_float":
        return _load_csv(path, sample_rate)
    if fmt == "wav_pcm16":
        return _load_wav(path, sample_rate)
    raise ParameterError(f"unknown waveform format {fmt!r}")


def _ordered(records):
    # receiver-major, then estimator, then trial; SNR blocks in first-seen order
    first = {}

    def rank(kind, key):
        return first.setdefault((kind, key), len(first))

    keyed = [((rank("snr", r.snr_db), rank("rcv", tuple(r.receiver)),
               rank("est", r.estimator), r.trial), r) for r in records]
    keyed.sort(key=lambda kr: kr[0])
    return [r for _, r in keyed]


def save_results(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for r in _ordered(records):
            x, y, z = r.receiver
            writer.writerow([fmt_float(x), fmt_float(y), fmt_float(z), fmt_float(r.true_distance),
                             r.estimator, fmt_float(r.snr_db), int(r.trial),
                             fmt_float(r.estimated_distance), fmt_float(r.abs_error)])


def load_results(path):
    from .experiments import ResultRecord

    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise ParseError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(RESULTS_HEADER):
                raise ParseError(f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields")
            try:
                out.append(ResultRecord(
                    (float(row[0]), float(row[1]), float(row[2])), float(row[3]), row[4],
                    float(row[7]), float(row[8]), int(row[6]), float(row[5])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt_float(x) if not math.isfinite(x) else float(fmt_float(x))
    if hasattr(obj, "as_dict"):
        return _jsonable(obj.as_dict())
    return obj


def write_summary(payload, path):
    """JSON summary with sorted keys and 9-digit floats."""
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
