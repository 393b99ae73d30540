"""Time-history parsing and scalar extraction.

The pipeline's CSV schema has five required channels (extra columns are
tolerated and ignored):

    time_ms, contact_force_kN, impactor_disp_mm, internal_energy_J,
    kinetic_energy_J

The mock solver emits exactly this schema; real solver exports can be
adapted by renaming columns to it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSeriesError,
    MalformedNumberError,
    MissingColumnError,
    NonMonotoneTimeError,
)

REQUIRED_COLUMNS = (
    "time_ms",
    "contact_force_kN",
    "impactor_disp_mm",
    "internal_energy_J",
    "kinetic_energy_J",
)

# Contact onset / averaging window threshold: fraction of the global force
# peak below which samples count as "before contact".
DEFAULT_ONSET_FRACTION = 0.01


@dataclass(frozen=True)
class TimeHistory:
    time_ms: np.ndarray
    force_kn: np.ndarray
    disp_mm: np.ndarray
    internal_j: np.ndarray
    kinetic_j: np.ndarray

    def __post_init__(self):
        n = len(self.time_ms)
        if n < 2:
            raise DegenerateSeriesError("time history needs at least 2 samples")
        if self.time_ms[0] < 0:
            raise NonMonotoneTimeError("time must start at t >= 0")
        if np.any(np.diff(self.time_ms) <= 0):
            raise NonMonotoneTimeError("time samples must strictly increase")

    def __len__(self) -> int:
        return len(self.time_ms)


@dataclass(frozen=True)
class SimulationRecord:
    """Scalar crash metrics extracted from one simulation."""

    th: TimeHistory
    delta_mm: float     # max impactor travel past first contact
    f_peak_kn: float
    f_mean_kn: float
    e_abs_j: float      # structural internal energy at final time
    m_s_kg: float       # structural mass


def parse_time_history(data: bytes | str) -> TimeHistory:
    """Parse a time-history CSV; strict on required columns, tolerant of
    extras.  Errors report the offending line number."""
    text = data.decode() if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MissingColumnError(f"missing required column '{col}'")

    rows = {col: [] for col in REQUIRED_COLUMNS}
    for lineno, record in enumerate(reader, start=2):
        for col in REQUIRED_COLUMNS:
            raw = (record.get(col) or "").strip()
            try:
                rows[col].append(float(raw))
            except ValueError:
                raise MalformedNumberError(
                    f"line {lineno}: bad value {raw!r} in column '{col}'"
                ) from None

    t = np.asarray(rows["time_ms"])
    if len(t) >= 2:
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise NonMonotoneTimeError(
                f"line {int(bad[0]) + 3}: time does not increase"
            )
    return TimeHistory(
        t,
        np.asarray(rows["contact_force_kN"]),
        np.asarray(rows["impactor_disp_mm"]),
        np.asarray(rows["internal_energy_J"]),
        np.asarray(rows["kinetic_energy_J"]),
    )


def serialize_time_history(th: TimeHistory) -> str:
    """Inverse of :func:`parse_time_history`; floats are written with
    ``repr`` so a parse round-trip is bit-exact."""
    out = [",".join(REQUIRED_COLUMNS)]
    for row in zip(th.time_ms, th.force_kn, th.disp_mm, th.internal_j,
                   th.kinetic_j):
        out.append(",".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def contact_onset_index(force_kn: np.ndarray,
                        onset_fraction: float = DEFAULT_ONSET_FRACTION) -> int:
    """First sample whose |force| exceeds the given fraction of the global
    peak; raises if the series carries no force at all."""
    mag = np.abs(np.asarray(force_kn, dtype=float))
    peak = mag.max() if len(mag) else 0.0
    if peak <= 0.0:
        raise DegenerateSeriesError("no contact detected (all-zero force)")
    return int(np.argmax(mag > onset_fraction * peak))


def peak_and_mean_force(time_ms, force_kn,
                        onset_fraction: float = DEFAULT_ONSET_FRACTION):
    """(F_peak, F_mean): peak of |force| over all samples and mean of
    |force| from contact onset through the last sample."""
    mag = np.abs(np.asarray(force_kn, dtype=float))
    start = contact_onset_index(force_kn, onset_fraction)
    return float(mag.max()), float(mag[start:].mean())


def extract_scalars(th: TimeHistory, mass_kg: float,
                    onset_fraction: float = DEFAULT_ONSET_FRACTION
                    ) -> SimulationRecord:
    """Compute the scalar crash metrics from a parsed time history.

    Intrusion is measured from the impactor position at first contact
    (onset of the force signal); the mean force uses the same onset and
    runs through the end of the record; absorbed energy is the final
    internal energy.
    """
    if mass_kg <= 0.0:
        raise DegenerateSeriesError(f"nonpositive structural mass {mass_kg}")
    start = contact_onset_index(th.force_kn, onset_fraction)
    f_peak, f_mean = peak_and_mean_force(th.time_ms, th.force_kn,
                                         onset_fraction)
    delta = float(np.max(th.disp_mm - th.disp_mm[start]))
    return SimulationRecord(
        th=th,
        delta_mm=max(delta, 0.0),
        f_peak_kn=f_peak,
        f_mean_kn=f_mean,
        e_abs_j=float(th.internal_j[-1]),
        m_s_kg=float(mass_kg),
    )
