"""Design-vector to geometry mapping for the three benchmark structures.

All functions here are pure: they take a *physical* design vector (mm) and
return immutable geometry descriptions consumed by the mesh generator.

Conventions
-----------
* Star box: cross-section in the x-y plane, extruded 120 mm along z.
* Bending beam: five vertical ribs (webs) of 120 mm height; each rib owns
  a wall-thickness profile over that height.
* Crash tube: rectangular 120 x 80 mm section, 800 mm tall, with up to ten
  trigger bands (five axial stations per face pair).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError

STARBOX_EXTRUSION_MM = 120.0
STARBOX_ROWS = 30
STARBOX_DEFAULT_THICKNESS_MM = 2.1

BEAM_RIB_HEIGHT_MM = 120.0
BEAM_RIB_ROWS = 8
BEAM_RIB_COUNT = 5
BEAM_FIXED_THICKNESS_MM = 1.7

TUBE_HEIGHT_MM = 800.0
TUBE_STATIONS_MM = tuple(TUBE_HEIGHT_MM * k / 6.0 for k in range(1, 6))
TRIGGER_DEFAULT = (0.0, 0.0, 8.0)  # (z offset, protrusion, height)
TRIGGER_RAMP_MM = 4.0  # one element row above/below each band

_BOUNDS_TOL = 1e-9


def _check_bounds(x, lower, upper, what):
    x = np.asarray(x, dtype=float)
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    bad = (x < lo - _BOUNDS_TOL) | (x > hi + _BOUNDS_TOL)
    if bad.any():
        i = int(np.argmax(bad))
        raise DomainError(
            f"{what}: component {i + 1} = {x[i]} outside [{lo[i]}, {hi[i]}]"
        )
    return x


@dataclass(frozen=True)
class CrossSection:
    """Closed planar polygon (mm) extruded along z."""

    vertices: tuple[tuple[float, float], ...]
    extrusion_length: float

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DomainError("cross-section needs at least 3 vertices")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 == x1 and y0 == y1:
                raise DomainError("cross-section has coincident adjacent vertices")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def area(self) -> float:
        v = self.as_array()
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def perimeter(self) -> float:
        v = self.as_array()
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))


@dataclass(frozen=True)
class ThicknessProfile:
    """Piecewise-linear wall thickness over a 0..extent height (mm).

    A single control point means a constant profile.  Between stations the
    value is linearly interpolated; outside the outermost stations it is
    held constant (saturated profiles place their stations at element-row
    centers, which do not touch z=0 / z=extent).
    """

    control_points: tuple[tuple[float, float], ...]
    extent: float = STARBOX_EXTRUSION_MM

    def __post_init__(self):
        z = np.asarray([p[0] for p in self.control_points], dtype=float)
        if len(z) == 0:
            raise DomainError("thickness profile needs at least one control point")
        if np.any(np.diff(z) <= 0):
            raise DomainError("control-point heights must be strictly increasing")
        if z[0] < -_BOUNDS_TOL or z[-1] > self.extent + _BOUNDS_TOL:
            raise DomainError("control points must lie within [0, extent]")

    def value_at(self, z: float) -> float:
        return thickness_at(self, z)


def thickness_at(profile: ThicknessProfile, z: float) -> float:
    """Wall thickness at height ``z`` via linear interpolation of the
    neighboring control points (constant for a one-point profile)."""
    if z < -_BOUNDS_TOL or z > profile.extent + _BOUNDS_TOL:
        raise DomainError(f"z = {z} outside profile extent [0, {profile.extent}]")
    pts = profile.control_points
    if len(pts) == 1:
        return float(pts[0][1])
    zs = np.asarray([p[0] for p in pts], dtype=float)
    ts = np.asarray([p[1] for p in pts], dtype=float)
    return float(np.interp(z, zs, ts))


def _profile_stations(n_points: int, extent: float, n_rows: int) -> np.ndarray:
    """Station heights for an n-point profile over [0, extent].

    Control points sit at uniformly spaced heights including both ends;
    once the profile saturates (one point per element row) the stations
    move to the row centers so every row reads its own variable exactly.
    """
    if n_points == n_rows:
        row = extent / n_rows
        return (np.arange(n_rows) + 0.5) * row
    return np.linspace(0.0, extent, n_points)


def _build_profile(values, extent: float, n_rows: int) -> ThicknessProfile:
    values = np.asarray(values, dtype=float)
    if values.size == 1:
        return ThicknessProfile(((0.0, float(values[0])),), extent)
    z = _profile_stations(values.size, extent, n_rows)
    return ThicknessProfile(tuple(zip(z.tolist(), values.tolist())), extent)


# ---------------------------------------------------------------------------
# star-shaped crash box
# ---------------------------------------------------------------------------

def _rectangle(width: float, height: float) -> tuple[tuple[float, float], ...]:
    w, h = width / 2.0, height / 2.0
    return ((w, h), (-w, h), (-w, -h), (w, -h))


def _star(width: float, height: float, inset_y: float, inset_x: float):
    """Eight-point star: bounding-rectangle corners alternating with edge
    midpoints pulled inward by ``inset_y`` (top/bottom) and ``inset_x``
    (left/right)."""
    w, h = width / 2.0, height / 2.0
    return (
        (w, h),
        (0.0, h - inset_y),
        (-w, h),
        (-w + inset_x, 0.0),
        (-w, -h),
        (0.0, -h + inset_y),
        (w, -h),
        (w - inset_x, 0.0),
    )


def starbox_bounds(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Physical variable bounds (mm) for the crash box at dimension d."""
    if not 1 <= d <= 34:
        raise DimensionError(f"star box supports d in 1..34, got {d}")
    per_dim = {
        1: [(60.0, 120.0)],
        2: [(60.0, 120.0)] * 2,
        3: [(60.0, 120.0)] * 2 + [(0.7, 3.0)],
        4: [(60.0, 120.0)] * 2 + [(0.0, 30.0)] * 2,
    }
    if d <= 4:
        pairs = per_dim[d]
    else:
        pairs = per_dim[4] + [(0.7, 3.0)] * (d - 4)
    lo, hi = zip(*pairs)
    return np.asarray(lo), np.asarray(hi)


def starbox_geometry(d: int, x_phys) -> tuple[CrossSection, ThicknessProfile]:
    """Cross-section polygon and wall-thickness profile for the crash box.

    d=1 square, d=2 rectangle, d=3 rectangle + uniform thickness, d=4
    star, d=5 star + uniform thickness, d>=6 star + piecewise-linear
    profile with control points x5..xd over the 120 mm extrusion.  Where
    thickness is not a variable (d in {1, 2, 4}) it is 2.1 mm.
    """
    lo, hi = starbox_bounds(d)
    x = _check_bounds(x_phys, lo, hi, "star box variables")
    if x.shape != (d,):
        raise DomainError(f"expected {d} variables, got {x.shape}")

    if d == 1:
        verts = _rectangle(x[0], x[0])
    elif d in (2, 3):
        verts = _rectangle(x[1], x[0])
    else:
        verts = _star(x[1], x[0], x[2], x[3])
    cs = CrossSection(verts, STARBOX_EXTRUSION_MM)

    if d in (1, 2, 4):
        thick = np.asarray([STARBOX_DEFAULT_THICKNESS_MM])
    elif d == 3:
        thick = x[2:3]
    else:
        thick = x[4:]
    profile = _build_profile(thick, STARBOX_EXTRUSION_MM, STARBOX_ROWS)
    return cs, profile


# ---------------------------------------------------------------------------
# three-point bending beam
# ---------------------------------------------------------------------------

# Rib position (left to right, 0-based) controlled by each variable for
# the coupled low-dimensional layouts; every dimension has its own
# assignment, e.g. d=3 reads (x3, 1.7, x1, 1.7, x2).  Ribs without an
# entry are fixed at 1.7 mm.
_BEAM_ASSIGNMENT = {
    2: {1: 4, 2: 0},
    3: {1: 2, 2: 4, 3: 0},
    4: {1: 3, 2: 1, 3: 4, 4: 0},
    5: {1: 2, 2: 3, 3: 1, 4: 4, 5: 0},
}


@dataclass(frozen=True)
class RibLayout:
    """Thickness profiles of the five beam ribs, ordered left to right."""

    rib_profiles: tuple[ThicknessProfile, ...]

    def __post_init__(self):
        if len(self.rib_profiles) != BEAM_RIB_COUNT:
            raise DomainError("beam layout needs exactly 5 rib profiles")


def beam_bounds(d: int) -> tuple[np.ndarray, np.ndarray]:
    if not 1 <= d <= 40:
        raise DimensionError(f"bending beam supports d in 1..40, got {d}")
    return np.full(d, 0.5), np.full(d, 3.0)


def beam_rib_layout(d: int, x_phys) -> RibLayout:
    """Rib thickness layout for the layered bending beam.

    For d<=5 each variable sets one rib's uniform thickness (d=1 couples
    all five ribs); uncontrolled ribs stay at 1.7 mm.  For d>5 every fifth
    new variable appends a control point to the same rib, cycling through
    the ribs in base-variable order, until each rib carries 8 points
    (one per element row) at d=40.
    """
    lo, hi = beam_bounds(d)
    x = _check_bounds(x_phys, lo, hi, "beam variables")
    if x.shape != (d,):
        raise DomainError(f"expected {d} variables, got {x.shape}")

    if d == 1:
        rib_values = [[x[0]] for _ in range(BEAM_RIB_COUNT)]
    else:
        assignment = _BEAM_ASSIGNMENT[min(d, 5)]
        rib_values = [[BEAM_FIXED_THICKNESS_MM] for _ in range(BEAM_RIB_COUNT)]
        for base, rib in assignment.items():
            rib_values[rib] = [x[base - 1]]
        for j in range(6, d + 1):
            base = (j - 6) % BEAM_RIB_COUNT + 1
            rib_values[assignment[base]].append(x[j - 1])

    profiles = tuple(
        _build_profile(vals, BEAM_RIB_HEIGHT_MM, BEAM_RIB_ROWS)
        for vals in rib_values
    )
    return RibLayout(profiles)


# ---------------------------------------------------------------------------
# long crash tube triggers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriggerTriplet:
    """One trigger band: axial offset of its centroid from the nominal
    station, signed protrusion, and band height (all mm)."""

    z: float
    epsilon: float
    h: float

    def __post_init__(self):
        if not -40.0 - _BOUNDS_TOL <= self.z <= 40.0 + _BOUNDS_TOL:
            raise DomainError(f"trigger z = {self.z} outside [-40, 40]")
        if not -4.0 - _BOUNDS_TOL <= self.epsilon <= 4.0 + _BOUNDS_TOL:
            raise DomainError(f"trigger epsilon = {self.epsilon} outside [-4, 4]")
        if not -_BOUNDS_TOL <= self.h <= 16.0 + _BOUNDS_TOL:
            raise DomainError(f"trigger h = {self.h} outside [0, 16]")


@dataclass(frozen=True)
class TriggerSet:
    """Ten trigger triplets: 1..5 on the wide face pair (A), 6..10 on the
    narrow face pair (B), one per axial station."""

    triggers: tuple[TriggerTriplet, ...]

    def __post_init__(self):
        if len(self.triggers) != 10:
            raise DomainError("trigger set needs exactly 10 triplets")

    def face_a(self) -> tuple[TriggerTriplet, ...]:
        return self.triggers[:5]

    def face_b(self) -> tuple[TriggerTriplet, ...]:
        return self.triggers[5:]


# Variable slots cycle (z, epsilon, h) per trigger, so the physical bounds
# repeat the same three intervals.
_TRIGGER_SLOT_BOUNDS = ((-40.0, 40.0), (-4.0, 4.0), (0.0, 16.0))


def tube_bounds(d: int) -> tuple[np.ndarray, np.ndarray]:
    if not 1 <= d <= 30:
        raise DimensionError(f"crash tube supports d in 1..30, got {d}")
    pairs = [_TRIGGER_SLOT_BOUNDS[i % 3] for i in range(d)]
    lo, hi = zip(*pairs)
    return np.asarray(lo), np.asarray(hi)


def trigger_mapping(d: int, x_phys) -> TriggerSet:
    """Assign design variables to trigger triplets per the equivalence
    matrices.

    Variables fill the face-A slots in order (z1, e1, h1, z2, ...); for
    d <= 15 face B mirrors face A, while for d >= 16 the face-B slots are
    taken over independently by x16..x30.  Unassigned slots default to
    (0, 0, 8).  One quirk is reproduced verbatim from the published
    matrix: at d = 2 the h1 slot is 0 (trigger suppressed) although its
    mirror slot h6 keeps the default 8.
    """
    lo, hi = tube_bounds(d)
    x = _check_bounds(x_phys, lo, hi, "tube variables")
    if x.shape != (d,):
        raise DomainError(f"expected {d} variables, got {x.shape}")

    def slot_default(slot: int) -> float:
        return TRIGGER_DEFAULT[slot % 3]

    face_a = [x[s] if s < min(d, 15) else slot_default(s) for s in range(15)]
    if d == 2:
        face_a[2] = 0.0
    if d <= 15:
        face_b = [x[s] if s < d else slot_default(s) for s in range(15)]
    else:
        face_b = [x[15 + s] if 15 + s < d else slot_default(s) for s in range(15)]

    slots = face_a + face_b
    triplets = tuple(
        TriggerTriplet(slots[3 * i], slots[3 * i + 1], slots[3 * i + 2])
        for i in range(10)
    )
    return TriggerSet(triplets)


def trigger_band_factor(trigger: TriggerTriplet, station: float, z) -> np.ndarray:
    """Lateral-offset weight at height(s) ``z`` for one trigger band.

    1 inside the band of height h centered at station + trigger.z, linear
    ramp to 0 over one element row above and below, 0 elsewhere.  A band
    of zero height is absent entirely.
    """
    z = np.asarray(z, dtype=float)
    if trigger.h <= 0.0:
        return np.zeros_like(z)
    center = station + trigger.z
    half = trigger.h / 2.0
    dist = np.abs(z - center)
    ramp = 1.0 - (dist - half) / TRIGGER_RAMP_MM
    return np.clip(np.minimum(1.0, ramp), 0.0, 1.0)
