"""Trajectory CSV export/import and the measurement-emulating signal chain
(discrete differentiation plus zero-phase low-pass filtering)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import signal as _signal

from .model import Trajectory

#: Default low-pass cutoff [Hz]: above the contact-oscillation scale,
#: well below Nyquist at 5 kHz sampling.
DEFAULT_CUTOFF = 200.0

#: CSV float format: full round-trip precision so golden-file tests are exact.
_FMT = "{:.17g}"

_UNIFORMITY_PPM = 1e-6


class CsvFormatError(ValueError):
    """Raised on malformed input CSV, with the offending line number."""


@dataclass(frozen=True)
class MeasuredTrace:
    """Uniformly sampled position measurement of the passive body."""

    fs: float
    t: np.ndarray
    x2: np.ndarray
    x1: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.t)


def load_csv(path) -> MeasuredTrace:
    """Load a measured trace from CSV with header ``t,x2`` or ``t,x1,x2``.

    Lines starting with ``#`` are ignored. Rejects non-finite values,
    non-monotone time stamps and a non-uniform time base (1 ppm).
    """
    rows = []
    row_lines = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in text.split(",")]
                # Accept 't,x2', 't,x1,x2' and the full trajectory export.
                if "t" not in header or "x2" not in header:
                    raise CsvFormatError(
                        f"line {lineno}: unsupported header {text!r}; need at "
                        f"least columns 't' and 'x2'"
                    )
                continue
            parts = text.split(",")
            if len(parts) != len(header):
                raise CsvFormatError(
                    f"line {lineno}: expected {len(header)} fields, got {len(parts)}"
                )
            try:
                values = [float(v) for v in parts]
            except ValueError:
                raise CsvFormatError(f"line {lineno}: non-numeric value in {text!r}")
            if not all(math.isfinite(v) for v in values):
                raise CsvFormatError(f"line {lineno}: non-finite value in {text!r}")
            rows.append(values)
            row_lines.append(lineno)
    if header is None:
        raise CsvFormatError("empty file: no header found")
    if len(rows) < 2:
        raise CsvFormatError("need at least 2 data rows")
    data = np.asarray(rows)
    t = data[:, header.index("t")]
    dts = np.diff(t)
    if np.any(dts <= 0.0):
        bad = int(np.argmax(dts <= 0.0))
        raise CsvFormatError(
            f"line {row_lines[bad + 1]}: time stamps not strictly increasing"
        )
    dt0 = float(np.median(dts))
    if np.any(np.abs(dts - dt0) > _UNIFORMITY_PPM * dt0):
        bad = int(np.argmax(np.abs(dts - dt0) > _UNIFORMITY_PPM * dt0))
        raise CsvFormatError(
            f"line {row_lines[bad + 1]}: non-uniform sampling "
            f"(dt={dts[bad]!r} vs {dt0!r})"
        )
    fs = 1.0 / dt0
    x2 = data[:, header.index("x2")]
    x1 = data[:, header.index("x1")] if "x1" in header else None
    return MeasuredTrace(fs=fs, t=t, x2=x2, x1=x1)


def differentiate(x: Sequence[float], fs: float) -> np.ndarray:
    """Discrete differentiation: central differences in the interior,
    one-sided at the ends. Exact on linear signals."""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise ValueError("series must have at least 3 samples")
    if not (fs > 0.0):
        raise ValueError(f"sample rate must be > 0, got {fs!r}")
    return np.gradient(x, 1.0 / fs)


def lowpass(v: Sequence[float], fs: float, fc: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Second-order Butterworth low-pass, applied forward then backward.

    Zero net phase, unit DC gain, -6 dB at fc (two -3 dB passes). Chosen
    zero-phase so filtered traces are not shifted against the position
    measurements they are compared to.
    """
    v = np.asarray(v, dtype=float)
    if not (0.0 < fc < fs / 2.0):
        raise ValueError(f"cutoff must satisfy 0 < fc < fs/2, got fc={fc!r}, fs={fs!r}")
    sos = _signal.butter(2, fc, fs=fs, output="sos")
    return _signal.sosfiltfilt(sos, v)


def _write_comment_lines(fh, comments):
    for c in comments or ():
        fh.write(f"# {c}\n")


def export_trajectory(traj: Trajectory, path, comments=None) -> None:
    """Write a trajectory as CSV ``t,x1,x2,v2,p,f,mode`` with events appended
    as ``# event,kind,t`` comment lines."""
    with open(path, "w", encoding="utf-8") as fh:
        _write_comment_lines(fh, comments)
        fh.write("t,x1,x2,v2,p,f,mode\n")
        for i in range(len(traj)):
            fields = [_FMT.format(v) for v in
                      (traj.t[i], traj.x1[i], traj.x2[i], traj.v2[i],
                       traj.p[i], traj.f[i])]
            fields.append(str(int(traj.mode[i])))
            fh.write(",".join(fields) + "\n")
        for e in traj.events:
            fh.write(f"# event,{e.kind.name},{_FMT.format(e.t_event)}\n")


def export_measured(t, x2, path, comments=None, extra=None) -> None:
    """Write a ``t,x2`` CSV (plus optional named extra columns after x2)."""
    cols = {"t": np.asarray(t, dtype=float), "x2": np.asarray(x2, dtype=float)}
    for name, series in (extra or {}).items():
        cols[name] = np.asarray(series, dtype=float)
    n = len(cols["t"])
    with open(path, "w", encoding="utf-8") as fh:
        _write_comment_lines(fh, comments)
        fh.write(",".join(cols) + "\n")
        for i in range(n):
            fh.write(",".join(_FMT.format(c[i]) for c in cols.values()) + "\n")


def export_hysteresis(samples, path, comments=None) -> None:
    """Write contact samples as CSV ``p,p_dot,f``."""
    with open(path, "w", encoding="utf-8") as fh:
        _write_comment_lines(fh, comments)
        fh.write("p,p_dot,f\n")
        for s in samples:
            fh.write(",".join(_FMT.format(v) for v in (s.p, s.p_dot, s.f)) + "\n")
