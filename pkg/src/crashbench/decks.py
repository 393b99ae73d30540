"""Solver input-deck generation (starter + engine text files).

The emitted dialect is a minimal OpenRadioss-style block format: nodes,
shells, part/property pairs, a tabulated-plasticity material, rigid
ground and impactor, a TYPE24 contact and time-history requests.  The
deck unit system is mm-ms-kg, i.e. forces in kN, stresses in GPa and
energies in J; the human-readable source values (MPa, kg/m^3) are kept in
comment lines next to each block.

All numbers are printed with a fixed 15-significant-digit scientific
format so deck bytes are reproducible across platforms and releases.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryError
from .meshing import ShellMesh

KMH_TO_MM_MS = 1.0 / 3.6  # km/hr -> mm/ms (= m/s)
TH_SAMPLE_MS = 0.1


def fmt(v: float) -> str:
    """Fixed-format float: 15 significant digits, scientific notation."""
    return f"{float(v):.14E}"


@dataclass(frozen=True)
class MaterialModel:
    """Elastic-plastic shell material with an 8-point hardening curve and
    an optional Cowper-Symonds strain-rate scaling."""

    name: str
    E_gpa: float
    nu: float
    rho_kg_m3: float
    sigma_y_mpa: float
    strain_rate: tuple[float, float] | None  # (C, p)
    plasticity_curve: tuple[tuple[float, float], ...]  # (plastic strain, MPa)

    def __post_init__(self):
        eps = [p[0] for p in self.plasticity_curve]
        sig = [p[1] for p in self.plasticity_curve]
        if eps[0] != 0.0:
            raise GeometryError("plasticity curve must start at zero strain")
        if np.any(np.diff(eps) <= 0) or np.any(np.diff(sig) <= 0):
            raise GeometryError("plasticity curve must be strictly increasing")


STEEL = MaterialModel(
    name="steel",
    E_gpa=200.0,
    nu=0.3,
    rho_kg_m3=7830.0,
    sigma_y_mpa=360.0,
    strain_rate=(40.0, 5.0),
    plasticity_curve=(
        (0.000, 366.0),
        (0.025, 424.0),
        (0.049, 476.0),
        (0.072, 507.0),
        (0.095, 529.0),
        (0.118, 546.0),
        (0.140, 559.0),
        (0.182, 584.0),
    ),
)

ALUMINUM = MaterialModel(
    name="aluminum",
    E_gpa=70.0,
    nu=0.33,
    rho_kg_m3=2700.0,
    sigma_y_mpa=180.0,
    strain_rate=None,
    plasticity_curve=(
        (0.00, 180.0),
        (0.01, 190.0),
        (0.02, 197.0),
        (0.05, 211.5),
        (0.10, 225.8),
        (0.15, 233.6),
        (0.20, 238.5),
        (0.40, 248.5),
    ),
)


@dataclass(frozen=True)
class SimConfig:
    """Per-problem simulation settings (impactor, timing, formulations)."""

    impactor_mass_kg: float
    impactor_velocity_kmh: float
    sim_time_ms: float
    height_mm: float
    impactor_radius_mm: float | None = None
    element_formulation: str = "Belytschko-Lin-Tsay"
    contact: str = "/INTER/TYPE24"
    clamp: str = "base"  # "base" (z=0 ring) or "both-ends" (x extremes)

    @property
    def impactor_velocity_mm_ms(self) -> float:
        return self.impactor_velocity_kmh * KMH_TO_MM_MS

    @property
    def impactor_kinetic_energy_j(self) -> float:
        # kg * (mm/ms)^2 == J
        return 0.5 * self.impactor_mass_kg * self.impactor_velocity_mm_ms**2


_SIM_CONFIGS = {
    1: SimConfig(impactor_mass_kg=250.0, impactor_velocity_kmh=25.2,
                 sim_time_ms=45.0, height_mm=120.0),
    2: SimConfig(impactor_mass_kg=86.0, impactor_velocity_kmh=36.0,
                 sim_time_ms=40.0, height_mm=120.0,
                 impactor_radius_mm=36.0, clamp="both-ends"),
    3: SimConfig(impactor_mass_kg=300.0, impactor_velocity_kmh=30.0,
                 sim_time_ms=45.0, height_mm=800.0),
}

_MATERIALS = {1: STEEL, 2: ALUMINUM, 3: STEEL}


def material_for(problem: int) -> MaterialModel:
    """Material card for a benchmark problem: steel for the crash box and
    tube, aluminum for the bending beam."""
    return _MATERIALS[int(problem)]


def sim_config_for(problem: int) -> SimConfig:
    return _SIM_CONFIGS[int(problem)]


@dataclass(frozen=True)
class DeckBundle:
    starter_text: str
    engine_text: str

    @property
    def checksum(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.starter_text.encode())
        digest.update(self.engine_text.encode())
        return digest.hexdigest()


def _material_block(mat: MaterialModel) -> list[str]:
    lines = [
        f"# {mat.name}: E = {mat.E_gpa:g} GPa, nu = {mat.nu:g}, "
        f"rho = {mat.rho_kg_m3:g} kg/m^3, sigma_y = {mat.sigma_y_mpa:g} MPa",
    ]
    if mat.strain_rate is not None:
        c, p = mat.strain_rate
        lines.append(f"# Cowper-Symonds strain rate: C = {c:g}, p = {p:g}")
    lines += [
        "/MAT/PLAS_TAB/1",
        mat.name,
        "#            rho_kg_mm3",
        f"  {fmt(mat.rho_kg_m3 * 1e-9)}",
        "#                 E_gpa                    nu           sigma_y_gpa",
        f"  {fmt(mat.E_gpa)}  {fmt(mat.nu)}  {fmt(mat.sigma_y_mpa / 1000.0)}",
    ]
    if mat.strain_rate is not None:
        c, p = mat.strain_rate
        lines += [
            "#                     C                     p",
            f"  {fmt(c)}  {fmt(p)}",
        ]
    lines += [
        "#  hardening curve: fct_id",
        "         1",
        "/FUNCT/1",
        f"# plastic strain [-] vs effective stress [GPa] ({mat.name})",
        "# source points in MPa: "
        + " ".join(f"({e:g}, {s:g})" for e, s in mat.plasticity_curve),
    ]
    for eps, sig_mpa in mat.plasticity_curve:
        lines.append(f"  {fmt(eps)}  {fmt(sig_mpa / 1000.0)}")
    return lines


def _impactor_block(cfg: SimConfig, case: str) -> list[str]:
    v = cfg.impactor_velocity_mm_ms
    lines = ["# rigid impactor (analytic, not meshed)"]
    if cfg.impactor_radius_mm is not None:
        lines += [
            "/RWALL/CYL/2",
            "impactor",
            "#             radius_mm               mass_kg",
            f"  {fmt(cfg.impactor_radius_mm)}  {fmt(cfg.impactor_mass_kg)}",
            "#  axis along y at mid-span, above the structure",
            f"  {fmt(400.0)}  {fmt(0.0)}  {fmt(cfg.height_mm + cfg.impactor_radius_mm)}",
        ]
    else:
        lines += [
            "/RWALL/PLANE/2",
            "impactor",
            "#               mass_kg",
            f"  {fmt(cfg.impactor_mass_kg)}",
            "#  plane z = height, normal -z",
            f"  {fmt(0.0)}  {fmt(0.0)}  {fmt(cfg.height_mm)}",
        ]
    lines += [
        "/IMPVEL/2",
        "#        v_z_mm_ms (initial, toward structure)",
        f"  {fmt(-v)}",
        f"# impactor kinetic energy = {fmt(cfg.impactor_kinetic_energy_j)} J",
    ]
    return lines


def _clamp_node_ids(mesh: ShellMesh, cfg: SimConfig) -> np.ndarray:
    if cfg.clamp == "base":
        mask = mesh.nodes[:, 2] == 0.0
    else:
        x = mesh.nodes[:, 0]
        mask = (x == x.min()) | (x == x.max())
    return np.flatnonzero(mask) + 1


def build_deck(mesh: ShellMesh, mat: MaterialModel, cfg: SimConfig,
               case: str = "case") -> DeckBundle:
    """Assemble the starter and engine text for one evaluation.

    The starter carries the full model (nodes, shells, one property block
    per thickness part, material, contact, clamps, impactor, TH
    requests); the engine sets the termination time and the time-history
    sampling interval.
    """
    for pid in np.unique(mesh.element_part):
        if int(pid) not in mesh.parts:
            raise GeometryError(f"mesh part {pid} has no thickness entry")

    s = [
        "#RADIOSS STARTER",
        f"# case {case} (units: mm ms kg -> kN, GPa, J)",
        "/BEGIN",
        case,
        "      2024         0",
        "                  kg                  mm                  ms",
    ]
    s += _material_block(mat)
    s.append(f"# shell formulation: {cfg.element_formulation}")
    for pid in sorted(mesh.parts):
        s += [
            f"/PART/{pid}",
            f"part_{pid}",
            f"       {pid}         1",
            f"/PROP/TYPE1/{pid}",
            f"shell_{pid}",
            "#          thickness_mm    Ishell",
            f"  {fmt(mesh.parts[pid])}         1",
        ]
    s.append("/NODE")
    for i, (x, y, z) in enumerate(mesh.nodes, start=1):
        s.append(f"{i:10d}  {fmt(x)}  {fmt(y)}  {fmt(z)}")
    part_ids = np.unique(mesh.element_part)
    eid = 0
    for pid in part_ids:
        s.append(f"/SHELL/{pid}")
        for conn in mesh.elements[mesh.element_part == pid]:
            eid += 1
            s.append(
                f"{eid:10d}{conn[0]:10d}{conn[1]:10d}{conn[2]:10d}{conn[3]:10d}"
            )
    clamp = _clamp_node_ids(mesh, cfg)
    s += [
        "/BCS/1",
        f"# clamped nodes ({cfg.clamp}): all dofs fixed",
        "   111 111",
    ]
    for nid in clamp:
        s.append(f"{nid:10d}")
    s += [
        "# rigid ground",
        "/RWALL/PLANE/1",
        "ground",
        f"  {fmt(0.0)}  {fmt(0.0)}  {fmt(0.0)}",
    ]
    s += _impactor_block(cfg, case)
    s += [
        f"# surface-to-surface contact ({cfg.contact})",
        "/INTER/TYPE24/1",
        "contact",
        "#  slave: structure, master: rigid walls",
        "         1         2",
        "# time-history requests",
        "/TH/RWALL/1",
        "impactor_force_disp",
        "/TH/PART/1",
        "internal_energy",
        "/TH/GLOB/1",
        "energy_balance",
        "/END",
    ]

    e = [
        "#RADIOSS ENGINE",
        f"/RUN/{case}/1",
        f"  {fmt(cfg.sim_time_ms)}",
        "/TFILE",
        f"  {fmt(TH_SAMPLE_MS)}",
        "/PRINT/-1",
        "/STOP",
    ]
    return DeckBundle("\n".join(s) + "\n", "\n".join(e) + "\n")


def write_deck_files(bundle: DeckBundle, work_dir: Path | str,
                     case: str = "case") -> tuple[Path, Path]:
    """Write ``<case>_0000.rad`` (starter) and ``<case>_0001.rad``
    (engine) into the working directory."""
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    starter = work_dir / f"{case}_0000.rad"
    engine = work_dir / f"{case}_0001.rad"
    starter.write_text(bundle.starter_text)
    engine.write_text(bundle.engine_text)
    return starter, engine


def parse_deck_nodes(starter_text: str) -> np.ndarray:
    """Read back the /NODE block (round-trip check for the emitter)."""
    coords = []
    in_block = False
    for line in starter_text.splitlines():
        if line.startswith("/NODE"):
            in_block = True
            continue
        if in_block:
            if line.startswith("/"):
                break
            parts = line.split()
            coords.append([float(v) for v in parts[1:4]])
    return np.asarray(coords)


def parse_deck_shells(starter_text: str) -> tuple[np.ndarray, np.ndarray]:
    """Read back all /SHELL blocks: (connectivity, part ids)."""
    conn, part = [], []
    current = None
    for line in starter_text.splitlines():
        if line.startswith("/SHELL/"):
            current = int(line.split("/")[2])
            continue
        if line.startswith("/"):
            current = None
            continue
        if current is not None:
            fields = line.split()
            conn.append([int(v) for v in fields[1:5]])
            part.append(current)
    return np.asarray(conn, dtype=np.int64), np.asarray(part, dtype=np.int64)
