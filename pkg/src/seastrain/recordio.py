"""Reading and writing DAS records.

Two on-disk encodings:

* binary (authoritative, bit-exact round trip): magic ``DASR``, u32
  version, then little-endian f64 sample rate, u32 channel count, u32
  sample count, f64 gauge length, f64 pulse width, f64 start time, f64
  channel positions, and the f64 strain matrix in channel-major order;
* text CSV (interoperability, 17 significant digits): comment header
  lines ``# das-record v1``, ``# fs_hz=``, ``# x0_m=``, ``# dx_m=``,
  ``# n_channels=`` (plus optional gauge/pulse/start-time keys), then one
  row per time sample with one column per channel. CSV requires uniformly
  spaced channels since the header only carries (x0, dx).

Numbers are always written with '.' as the decimal point regardless of
locale.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .dassim import DasRecord
from .errors import FormatError, InvalidArgumentError

MAGIC = b"DASR"
BINARY_VERSION = 1
CSV_HEADER = "# das-record v1"

_HEAD = struct.Struct("<4sI")          # magic, version
_META = struct.Struct("<dIIddd")       # fs, n_ch, n_samp, gauge, pulse, start

FORMATS = ("bin", "csv")


def write_das_record(rec: DasRecord, path, fmt: str = "bin") -> None:
    """Serialize a record to ``path`` in the given format ('bin' or 'csv')."""
    if fmt == "bin":
        _write_binary(rec, Path(path))
    elif fmt == "csv":
        _write_csv(rec, Path(path))
    else:
        raise InvalidArgumentError(f"format must be one of {FORMATS}, got {fmt!r}")


def read_das_record(path) -> DasRecord:
    """Parse a record file, auto-detecting the encoding from its first byte.

    CSV files start with the '#' comment marker; anything else is parsed as
    binary so that damaged binary files report their own offsets.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(1)
    if head == b"#":
        return _read_csv(path)
    return _read_binary(path)


def record_to_bytes(rec: DasRecord, fmt: str = "bin") -> bytes:
    """Serialized record as bytes (same layouts as the file writers)."""
    if fmt == "bin":
        return _binary_bytes(rec)
    if fmt == "csv":
        return _csv_text(rec).encode("ascii")
    raise InvalidArgumentError(f"format must be one of {FORMATS}, got {fmt!r}")


def record_from_bytes(blob: bytes) -> DasRecord:
    """Parse a serialized record from bytes, auto-detecting the encoding."""
    if blob[:1] == b"#":
        return _parse_csv_lines(blob.decode("ascii", errors="replace").splitlines())
    return _parse_binary(blob)


# -- binary ------------------------------------------------------------------


def _binary_bytes(rec: DasRecord) -> bytes:
    parts = [
        _HEAD.pack(MAGIC, BINARY_VERSION),
        _META.pack(
            rec.sample_rate_hz,
            rec.n_channels,
            rec.n_samples,
            rec.gauge_length_m,
            rec.pulse_width_m,
            rec.start_time_s,
        ),
        np.ascontiguousarray(rec.channel_positions_m, dtype="<f8").tobytes(),
        np.ascontiguousarray(rec.data, dtype="<f8").tobytes(),
    ]
    return b"".join(parts)


def _write_binary(rec: DasRecord, path: Path) -> None:
    path.write_bytes(_binary_bytes(rec))


def _read_binary(path: Path) -> DasRecord:
    return _parse_binary(path.read_bytes())


def _parse_binary(blob: bytes) -> DasRecord:
    if len(blob) < _HEAD.size:
        raise FormatError(
            f"truncated header: {len(blob)} bytes, need {_HEAD.size} at offset 0"
        )
    magic, version = _HEAD.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic bytes {magic!r} at offset 0, expected {MAGIC!r}")
    if version != BINARY_VERSION:
        raise FormatError(f"unsupported binary version {version} at offset 4")
    if len(blob) < _HEAD.size + _META.size:
        raise FormatError(
            f"truncated metadata at offset {len(blob)}, "
            f"need {_HEAD.size + _META.size} bytes"
        )
    fs, n_ch, n_samp, gauge, pulse, start = _META.unpack_from(blob, _HEAD.size)
    if not fs > 0:
        raise FormatError(f"field sample_rate_hz must be > 0, got {fs}")
    if n_ch < 1:
        raise FormatError(f"field n_channels must be >= 1, got {n_ch}")
    offset = _HEAD.size + _META.size
    pos_bytes = 8 * n_ch
    data_bytes = 8 * n_ch * n_samp
    expected = offset + pos_bytes + data_bytes
    if len(blob) != expected:
        raise FormatError(
            f"size mismatch: header claims {n_ch} channels x {n_samp} samples "
            f"({expected} bytes) but file has {len(blob)} bytes "
            f"(truncated at offset {min(len(blob), expected)})"
        )
    positions = np.frombuffer(blob, dtype="<f8", count=n_ch, offset=offset)
    data = np.frombuffer(
        blob, dtype="<f8", count=n_ch * n_samp, offset=offset + pos_bytes
    ).reshape(n_ch, n_samp)
    if not np.all(np.isfinite(positions)):
        raise FormatError("field channel_positions_m contains non-finite values")
    if not np.all(np.isfinite(data)):
        raise FormatError("field data contains non-finite values")
    if n_ch >= 2 and not np.all(np.diff(positions) > 0):
        raise FormatError("field channel_positions_m is not strictly increasing")
    return DasRecord(
        sample_rate_hz=fs,
        channel_positions_m=positions.copy(),
        data=data.copy(),
        gauge_length_m=gauge,
        pulse_width_m=pulse,
        start_time_s=start,
    )


# -- csv ---------------------------------------------------------------------

# 17 significant digits round-trip any f64; format() never uses a locale comma
def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _csv_text(rec: DasRecord) -> str:
    spacing = np.diff(rec.channel_positions_m)
    if rec.n_channels >= 2 and np.max(spacing) - np.min(spacing) > 1e-9:
        raise InvalidArgumentError(
            "csv format requires uniformly spaced channels; use the binary format"
        )
    dx = float(np.mean(spacing)) if rec.n_channels >= 2 else 0.0
    lines = [
        CSV_HEADER,
        f"# fs_hz={_fmt(rec.sample_rate_hz)}",
        f"# x0_m={_fmt(float(rec.channel_positions_m[0]))}",
        f"# dx_m={_fmt(dx)}",
        f"# n_channels={rec.n_channels}",
        f"# gauge_length_m={_fmt(rec.gauge_length_m)}",
        f"# pulse_width_m={_fmt(rec.pulse_width_m)}",
        f"# start_time_s={_fmt(rec.start_time_s)}",
    ]
    cols = rec.data.T  # one row per time sample
    for row in cols:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _write_csv(rec: DasRecord, path: Path) -> None:
    path.write_text(_csv_text(rec), encoding="ascii")


_REQUIRED_KEYS = ("fs_hz", "x0_m", "dx_m", "n_channels")
_OPTIONAL_KEYS = ("gauge_length_m", "pulse_width_m", "start_time_s")


def _read_csv(path: Path) -> DasRecord:
    with open(path, "r", encoding="ascii") as fh:
        return _parse_csv_lines(fh.read().splitlines())


def _parse_csv_lines(lines: list[str]) -> DasRecord:
    if not lines or lines[0].strip() != CSV_HEADER:
        raise FormatError(f"first line must be {CSV_HEADER!r}")
    meta: dict[str, str] = {}
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        if not line.startswith("#"):
            body_start = i
            break
        key, sep, value = line[1:].strip().partition("=")
        if not sep:
            raise FormatError(f"malformed header line {i + 1}: {line!r}")
        key = key.strip()
        if key not in _REQUIRED_KEYS + _OPTIONAL_KEYS:
            raise FormatError(f"unknown header key {key!r} on line {i + 1}")
        meta[key] = value.strip()
        body_start = i + 1
    for key in _REQUIRED_KEYS:
        if key not in meta:
            raise FormatError(f"missing required header key {key!r}")
    try:
        fs = float(meta["fs_hz"])
        x0 = float(meta["x0_m"])
        dx = float(meta["dx_m"])
        n_ch = int(meta["n_channels"])
    except ValueError as exc:
        raise FormatError(f"unparseable header value: {exc}") from exc
    if n_ch >= 2 and not dx > 0:
        raise FormatError(f"field dx_m must be > 0, got {dx}")

    rows = []
    for i, line in enumerate(lines[body_start:], start=body_start):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != n_ch:
            raise FormatError(
                f"row on line {i + 1} has {len(fields)} columns, header claims "
                f"{n_ch} channels"
            )
        try:
            rows.append([float(v) for v in fields])
        except ValueError as exc:
            raise FormatError(f"unparseable value on line {i + 1}: {exc}") from exc
    if not rows:
        raise FormatError("no data rows after the header")
    data = np.asarray(rows, dtype=float).T  # back to channels x samples
    if not np.all(np.isfinite(data)):
        raise FormatError("field data contains non-finite values")
    positions = x0 + dx * np.arange(n_ch)
    return DasRecord(
        sample_rate_hz=fs,
        channel_positions_m=positions,
        data=data,
        gauge_length_m=float(meta.get("gauge_length_m", 1.6)),
        pulse_width_m=float(meta.get("pulse_width_m", 2.0)),
        start_time_s=float(meta.get("start_time_s", 0.0)),
    )
