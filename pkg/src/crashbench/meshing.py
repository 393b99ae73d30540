"""Structured quadrilateral shell meshes for the three benchmark structures.

Node and element counts depend only on the problem (and, for the star box,
on whether the section is a rectangle or a star), never on the design
variables, so identical inputs reproduce identical meshes byte for byte.
Node ids are 1-based and row-major by (row, position within the row).

Discretization targets a 4 mm edge:

* star box: 30 element rows over the 120 mm extrusion, 96 nodes per ring
  (rectangle edges split in 24, star half-edges in 12);
* beam ribs: 8 rows of 15 mm over the 120 mm height, 200 columns along
  the 800 mm span; flanges on a plain 4 mm grid;
* crash tube: 200 rows of 4 mm over the 800 mm height, 100 nodes per
  ring, so trigger bands (h <= 16 mm) span at most 4 rows plus the one-row
  ramps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .parameterization import (
    BEAM_FIXED_THICKNESS_MM,
    BEAM_RIB_HEIGHT_MM,
    BEAM_RIB_ROWS,
    CrossSection,
    RibLayout,
    STARBOX_ROWS,
    ThicknessProfile,
    TriggerSet,
    TRIGGER_RAMP_MM,
    TUBE_HEIGHT_MM,
    TUBE_STATIONS_MM,
    thickness_at,
    trigger_band_factor,
)

TARGET_EDGE_MM = 4.0

BEAM_SPAN_MM = 800.0
BEAM_DEPTH_MM = 80.0

TUBE_WIDTH_MM = 120.0
TUBE_DEPTH_MM = 80.0
TUBE_ROWS = 200
# The tube wall gauge is not a design variable; 2.1 mm matches the fixed
# gauge used by the crash-box family.
TUBE_WALL_THICKNESS_MM = 2.1


@dataclass(frozen=True)
class ShellMesh:
    """Quad shell mesh: node coordinates (mm), 1-based connectivity, and a
    part table mapping each element group to its wall thickness."""

    nodes: np.ndarray            # (n_nodes, 3) float
    elements: np.ndarray         # (n_elems, 4) int, 1-based node ids
    element_part: np.ndarray     # (n_elems,) int part id
    parts: dict[int, float]      # part id -> thickness mm

    def __post_init__(self):
        if self.elements.min() < 1 or self.elements.max() > len(self.nodes):
            raise GeometryError("element references a nonexistent node")
        missing = set(np.unique(self.element_part)) - set(self.parts)
        if missing:
            raise GeometryError(f"parts without thickness: {sorted(missing)}")

    @property
    def barycenters(self) -> np.ndarray:
        return self.nodes[self.elements - 1].mean(axis=1)

    def element_corners(self) -> np.ndarray:
        return self.nodes[self.elements - 1]  # (n_elems, 4, 3)

    def dump(self) -> str:
        """Plain-text listing (debug aid): NODE/ELEM/PART records with
        fixed formatting."""
        out = []
        for i, (x, y, z) in enumerate(self.nodes, start=1):
            out.append(f"NODE {i} {x!r} {y!r} {z!r}")
        for i, (conn, pid) in enumerate(zip(self.elements, self.element_part), 1):
            out.append(f"ELEM {i} {conn[0]} {conn[1]} {conn[2]} {conn[3]} {pid}")
        for pid in sorted(self.parts):
            out.append(f"PART {pid} {self.parts[pid]!r}")
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class MassReport:
    total_kg: float
    per_part_kg: dict[int, float]


def _subdivide_ring(vertices: np.ndarray, segments_per_edge: int) -> np.ndarray:
    """Closed polygon -> ring of perimeter nodes, each edge split into a
    fixed number of segments (end vertex of each edge starts the next)."""
    pts = []
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        for k in range(segments_per_edge):
            t = k / segments_per_edge
            pts.append(a + t * (b - a))
    return np.asarray(pts)


def _extrude_ring(ring_xy: np.ndarray, z_levels: np.ndarray):
    """Tile a cross-section ring along z; returns nodes and the quad
    connectivity between consecutive rings (1-based ids)."""
    p = len(ring_xy)
    n_rings = len(z_levels)
    nodes = np.empty((n_rings * p, 3))
    nodes[:, 0] = np.tile(ring_xy[:, 0], n_rings)
    nodes[:, 1] = np.tile(ring_xy[:, 1], n_rings)
    nodes[:, 2] = np.repeat(z_levels, p)

    pos = np.arange(p)
    nxt = (pos + 1) % p
    rows = np.arange(n_rings - 1)[:, None] * p
    elements = np.empty(((n_rings - 1) * p, 4), dtype=np.int64)
    elements[:, 0] = (rows + pos).ravel() + 1
    elements[:, 1] = (rows + nxt).ravel() + 1
    elements[:, 2] = (rows + p + nxt).ravel() + 1
    elements[:, 3] = (rows + p + pos).ravel() + 1
    return nodes, elements


def _grid_patch(xs: np.ndarray, ys: np.ndarray, plane: str, offset: float,
                id_base: int):
    """Structured rectangular patch in a coordinate plane.

    ``plane`` names the in-plane axes ('xz' for ribs, 'xy' for flanges);
    ``offset`` is the fixed out-of-plane coordinate.
    """
    ni, nj = len(xs), len(ys)
    ii, jj = np.meshgrid(np.arange(ni), np.arange(nj), indexing="ij")
    flat_i, flat_j = ii.ravel(), jj.ravel()
    nodes = np.empty((ni * nj, 3))
    if plane == "xz":
        nodes[:, 0] = xs[flat_i]
        nodes[:, 1] = offset
        nodes[:, 2] = ys[flat_j]
    elif plane == "xy":
        nodes[:, 0] = xs[flat_i]
        nodes[:, 1] = ys[flat_j]
        nodes[:, 2] = offset
    else:
        raise ValueError(plane)

    ci, cj = np.meshgrid(np.arange(ni - 1), np.arange(nj - 1), indexing="ij")
    ci, cj = ci.ravel(), cj.ravel()
    n00 = ci * nj + cj
    elements = np.column_stack([
        n00, n00 + nj, n00 + nj + 1, n00 + 1,
    ]) + id_base + 1
    return nodes, elements, cj  # cj = row index within the patch


def mesh_starbox(cs: CrossSection, profile: ThicknessProfile) -> ShellMesh:
    """Extrude the crash-box section into 30 element rows; each row is its
    own part with the thickness interpolated at the row mid-height."""
    area = cs.area()
    if area <= 0.0:
        raise GeometryError(f"cross-section is degenerate (area {area})")
    verts = cs.as_array()
    segments = 24 if len(verts) == 4 else 12
    ring = _subdivide_ring(verts, segments)
    height = cs.extrusion_length
    z_levels = np.linspace(0.0, height, STARBOX_ROWS + 1)
    nodes, elements = _extrude_ring(ring, z_levels)

    row_of_elem = np.repeat(np.arange(STARBOX_ROWS), len(ring))
    row_mid = (np.arange(STARBOX_ROWS) + 0.5) * (height / STARBOX_ROWS)
    parts = {
        r + 1: thickness_at(profile, z) for r, z in enumerate(row_mid)
    }
    return ShellMesh(nodes, elements, row_of_elem + 1, parts)


def mesh_beam(layout: RibLayout) -> ShellMesh:
    """Five rib webs (8 element rows each, one part per row) plus top and
    bottom flange skins at the fixed 1.7 mm gauge."""
    xs = np.linspace(0.0, BEAM_SPAN_MM, int(BEAM_SPAN_MM / TARGET_EDGE_MM) + 1)
    zs = np.linspace(0.0, BEAM_RIB_HEIGHT_MM, BEAM_RIB_ROWS + 1)
    rib_y = [BEAM_DEPTH_MM * k / 6.0 for k in range(1, 6)]

    all_nodes, all_elems, all_parts = [], [], []
    parts: dict[int, float] = {}
    id_base = 0
    row_mid = (np.arange(BEAM_RIB_ROWS) + 0.5) * (
        BEAM_RIB_HEIGHT_MM / BEAM_RIB_ROWS
    )
    for rib, (y, prof) in enumerate(zip(rib_y, layout.rib_profiles)):
        nodes, elems, row = _grid_patch(xs, zs, "xz", y, id_base)
        pid = rib * BEAM_RIB_ROWS + row + 1
        for r, z in enumerate(row_mid):
            parts[rib * BEAM_RIB_ROWS + r + 1] = thickness_at(prof, z)
        all_nodes.append(nodes)
        all_elems.append(elems)
        all_parts.append(pid)
        id_base += len(nodes)

    ys = np.linspace(0.0, BEAM_DEPTH_MM, int(BEAM_DEPTH_MM / TARGET_EDGE_MM) + 1)
    flange_part_base = 5 * BEAM_RIB_ROWS
    for k, z_off in enumerate((0.0, BEAM_RIB_HEIGHT_MM)):
        nodes, elems, _ = _grid_patch(xs, ys, "xy", z_off, id_base)
        pid = flange_part_base + k + 1
        parts[pid] = BEAM_FIXED_THICKNESS_MM
        all_nodes.append(nodes)
        all_elems.append(elems)
        all_parts.append(np.full(len(elems), pid))
        id_base += len(nodes)

    return ShellMesh(
        np.vstack(all_nodes),
        np.vstack(all_elems),
        np.concatenate(all_parts),
        parts,
    )


def _check_band_overlap(triggers, face_name: str):
    spans = []
    for i, (trig, station) in enumerate(zip(triggers, TUBE_STATIONS_MM)):
        if trig.h <= 0.0:
            continue
        c = station + trig.z
        spans.append((c - trig.h / 2.0 - TRIGGER_RAMP_MM,
                      c + trig.h / 2.0 + TRIGGER_RAMP_MM, i + 1))
    spans.sort()
    for (lo0, hi0, i0), (lo1, hi1, i1) in zip(spans, spans[1:]):
        if lo1 < hi0:
            raise GeometryError(
                f"trigger bands {i0} and {i1} overlap on face {face_name} "
                f"([{lo0:.1f}, {hi0:.1f}] vs [{lo1:.1f}, {hi1:.1f}] mm)"
            )


def mesh_crashtube(triggers: TriggerSet) -> ShellMesh:
    """Rectangular tube at uniform wall gauge, with trigger bands pressed
    into the walls.

    Each trigger displaces the interior nodes of *both* walls of its face
    pair by the signed protrusion (positive = outward), constant inside
    the band and fading to zero over one element row above and below.
    Corner node columns never move.
    """
    _check_band_overlap(triggers.face_a(), "A")
    _check_band_overlap(triggers.face_b(), "B")

    w, dpt = TUBE_WIDTH_MM / 2.0, TUBE_DEPTH_MM / 2.0
    seg_a = int(TUBE_WIDTH_MM / TARGET_EDGE_MM)
    seg_b = int(TUBE_DEPTH_MM / TARGET_EDGE_MM)
    ring = np.vstack([
        np.column_stack([w - TARGET_EDGE_MM * np.arange(seg_a), np.full(seg_a, dpt)]),
        np.column_stack([np.full(seg_b, -w), dpt - TARGET_EDGE_MM * np.arange(seg_b)]),
        np.column_stack([-w + TARGET_EDGE_MM * np.arange(seg_a), np.full(seg_a, -dpt)]),
        np.column_stack([np.full(seg_b, w), -dpt + TARGET_EDGE_MM * np.arange(seg_b)]),
    ])
    z_levels = np.linspace(0.0, TUBE_HEIGHT_MM, TUBE_ROWS + 1)
    nodes, elements = _extrude_ring(ring, z_levels)

    on_a = (np.abs(nodes[:, 1]) == dpt) & (np.abs(nodes[:, 0]) < w)
    on_b = (np.abs(nodes[:, 0]) == w) & (np.abs(nodes[:, 1]) < dpt)
    z = nodes[:, 2]
    offset_a = np.zeros(len(nodes))
    offset_b = np.zeros(len(nodes))
    for trig, station in zip(triggers.face_a(), TUBE_STATIONS_MM):
        offset_a += trig.epsilon * trigger_band_factor(trig, station, z)
    for trig, station in zip(triggers.face_b(), TUBE_STATIONS_MM):
        offset_b += trig.epsilon * trigger_band_factor(trig, station, z)

    nodes[:, 1] += np.where(on_a, np.sign(nodes[:, 1]) * offset_a, 0.0)
    nodes[:, 0] += np.where(on_b, np.sign(nodes[:, 0]) * offset_b, 0.0)

    parts = {1: TUBE_WALL_THICKNESS_MM}
    return ShellMesh(nodes, elements, np.ones(len(elements), dtype=np.int64),
                     parts)


def quad_areas(mesh: ShellMesh) -> np.ndarray:
    """Planar quad areas (mm^2) as the sum of the two triangle halves."""
    c = mesh.element_corners()
    d1 = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    d2 = np.cross(c[:, 2] - c[:, 0], c[:, 3] - c[:, 0])
    return 0.5 * (np.linalg.norm(d1, axis=1) + np.linalg.norm(d2, axis=1))


def aspect_ratios(mesh: ShellMesh) -> np.ndarray:
    c = mesh.element_corners()
    edges = np.stack([
        c[:, 1] - c[:, 0], c[:, 2] - c[:, 1],
        c[:, 3] - c[:, 2], c[:, 0] - c[:, 3],
    ], axis=1)
    lengths = np.linalg.norm(edges, axis=2)
    return lengths.max(axis=1) / lengths.min(axis=1)


def compute_mass(mesh: ShellMesh, density_kg_m3: float) -> MassReport:
    """Shell mass: element area x part thickness x density, reported per
    part and in total (kg)."""
    if density_kg_m3 < 0:
        raise GeometryError("density must be non-negative")
    rho_mm = density_kg_m3 * 1e-9  # kg/mm^3
    areas = quad_areas(mesh)
    max_pid = int(mesh.element_part.max())
    thickness_of = np.zeros(max_pid + 1)
    for pid, t in mesh.parts.items():
        thickness_of[pid] = t
    elem_mass = areas * thickness_of[mesh.element_part] * rho_mm
    per_part = {
        int(pid): float(elem_mass[mesh.element_part == pid].sum())
        for pid in np.unique(mesh.element_part)
    }
    return MassReport(float(elem_mass.sum()), per_part)
