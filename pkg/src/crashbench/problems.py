"""Benchmark problem definitions, normalized-domain mapping, objectives
and the end-to-end evaluation pipeline.

Three scalable crashworthiness problems are exposed:

1. star-shaped crash box   (d = 1..34): maximize specific energy
   absorption under a 60 mm intrusion limit;
2. layered bending beam    (d = 1..40): minimize mass under a 50 mm
   intrusion limit;
3. long crash tube         (d = 1..30): minimize load uniformity
   (unconstrained).

Optimizers work in the normalized domain [-5, 5]^d; the affine map to
physical millimeters is part of the problem definition.  Constrained
problems additionally expose piecewise "penalized" single objectives so
unconstrained optimizers can be used directly.
"""

from __future__ import annotations

import shutil
import tempfile
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Callable

import numpy as np

from . import parameterization as par
from .decks import build_deck, material_for, sim_config_for
from .errors import (
    CrashBenchError,
    DomainError,
    SolverError,
    UnknownObjectiveError,
)
from .meshing import compute_mass, mesh_beam, mesh_crashtube, mesh_starbox
from .postprocess import (
    DEFAULT_ONSET_FRACTION,
    SimulationRecord,
    extract_scalars,
    parse_time_history,
    peak_and_mean_force,
)
from .solver import (
    DEFAULT_TIMEOUT_S,
    ExitStatus,
    MockInputs,
    SolverJob,
    SolverMode,
    run,
)

NORM_LO, NORM_HI = -5.0, 5.0

# Intrusion limits (mm) defining feasibility; the tube problem is
# unconstrained.
SEA_INTRUSION_LIMIT_MM = 60.0
MASS_INTRUSION_LIMIT_MM = 50.0
PENALIZED_SEA_SLOPE = 100.0
PENALIZED_MASS_BASE = 4.25952
PENALIZED_MASS_SLOPE = 10.0


class ProblemId(IntEnum):
    STAR_BOX = 1
    THREE_POINT_BENDING = 2
    LONG_CRASH_TUBE = 3


class ObjectiveKind(str, Enum):
    SEA = "sea"
    PENALIZED_SEA = "penalized_sea"
    MASS = "mass"
    PENALIZED_MASS = "penalized_mass"
    LOAD_UNIFORMITY = "load_uniformity"
    INTRUSION = "intrusion"
    ABSORBED_ENERGY = "absorbed_energy"
    PEAK_FORCE = "peak_force"
    MEAN_FORCE = "mean_force"


DEFAULT_OBJECTIVES = {
    ProblemId.STAR_BOX: (ObjectiveKind.PENALIZED_SEA,),
    ProblemId.THREE_POINT_BENDING: (ObjectiveKind.PENALIZED_MASS,),
    ProblemId.LONG_CRASH_TUBE: (ObjectiveKind.LOAD_UNIFORMITY,),
}

INTRUSION_LIMITS_MM = {
    ProblemId.STAR_BOX: SEA_INTRUSION_LIMIT_MM,
    ProblemId.THREE_POINT_BENDING: MASS_INTRUSION_LIMIT_MM,
    ProblemId.LONG_CRASH_TUBE: None,
}

DIMENSION_RANGES = {
    ProblemId.STAR_BOX: (1, 34),
    ProblemId.THREE_POINT_BENDING: (1, 40),
    ProblemId.LONG_CRASH_TUBE: (1, 30),
}

_BOUNDS_FN = {
    ProblemId.STAR_BOX: par.starbox_bounds,
    ProblemId.THREE_POINT_BENDING: par.beam_bounds,
    ProblemId.LONG_CRASH_TUBE: par.tube_bounds,
}

# Mock-surrogate geometry summaries: axial length over which the mass is
# smeared into a load-bearing section, and the crushable length capping
# the intrusion.
_MOCK_GEOMETRY = {
    ProblemId.STAR_BOX: (120.0, 120.0),
    ProblemId.THREE_POINT_BENDING: (800.0, 120.0),
    ProblemId.LONG_CRASH_TUBE: (800.0, 800.0),
}


# ---------------------------------------------------------------------------
# objective formulas
# ---------------------------------------------------------------------------

def sea(e_abs_j: float, m_s_kg: float) -> float:
    """Specific energy absorption: absorbed energy per structural mass
    (J/kg)."""
    if m_s_kg <= 0.0:
        raise DomainError(f"nonpositive structural mass {m_s_kg}")
    if e_abs_j < 0.0:
        raise DomainError(f"negative absorbed energy {e_abs_j}")
    return e_abs_j / m_s_kg


def penalized_sea(sea_val: float, delta_mm: float) -> float:
    """Piecewise minimization objective for the crash box: -SEA while the
    intrusion stays within 60 mm, otherwise 100 * (delta - 60) regardless
    of the SEA value."""
    if delta_mm < 0.0:
        raise DomainError(f"negative intrusion {delta_mm}")
    if delta_mm <= SEA_INTRUSION_LIMIT_MM:
        return -sea_val
    return PENALIZED_SEA_SLOPE * (delta_mm - SEA_INTRUSION_LIMIT_MM)


def penalized_mass(m_s_kg: float, delta_mm: float) -> float:
    """Piecewise minimization objective for the beam: the structural mass
    while the intrusion stays within 50 mm, otherwise
    4.25952 + 10 * (delta/50 - 1)."""
    if m_s_kg <= 0.0:
        raise DomainError(f"nonpositive structural mass {m_s_kg}")
    if delta_mm < 0.0:
        raise DomainError(f"negative intrusion {delta_mm}")
    if delta_mm <= MASS_INTRUSION_LIMIT_MM:
        return m_s_kg
    return PENALIZED_MASS_BASE + PENALIZED_MASS_SLOPE * (
        delta_mm / MASS_INTRUSION_LIMIT_MM - 1.0
    )


def load_uniformity(force_series) -> float:
    """|F_peak / F_mean| over a (time, force) series: peak of the absolute
    force against its mean from contact onset to the end of the record."""
    series = np.asarray(force_series, dtype=float)
    if series.ndim != 2 or series.shape[1] != 2 or len(series) == 0:
        raise DomainError("force series must be a non-empty list of "
                          "(time, force) pairs")
    f_peak, f_mean = peak_and_mean_force(series[:, 0], series[:, 1])
    return f_peak / f_mean


def _extract_sea(rec: SimulationRecord) -> float:
    return sea(rec.e_abs_j, rec.m_s_kg)


def _extract_penalized_sea(rec: SimulationRecord) -> float:
    # the infeasible branch never evaluates SEA
    if rec.delta_mm <= SEA_INTRUSION_LIMIT_MM:
        return penalized_sea(sea(rec.e_abs_j, rec.m_s_kg), rec.delta_mm)
    return penalized_sea(0.0, rec.delta_mm)


_OBJECTIVE_REGISTRY: dict[ObjectiveKind, Callable[[SimulationRecord], float]] = {
    ObjectiveKind.SEA: _extract_sea,
    ObjectiveKind.PENALIZED_SEA: _extract_penalized_sea,
    ObjectiveKind.MASS: lambda rec: rec.m_s_kg,
    ObjectiveKind.PENALIZED_MASS: lambda rec: penalized_mass(rec.m_s_kg,
                                                             rec.delta_mm),
    ObjectiveKind.LOAD_UNIFORMITY: lambda rec: rec.f_peak_kn / rec.f_mean_kn,
    ObjectiveKind.INTRUSION: lambda rec: rec.delta_mm,
    ObjectiveKind.ABSORBED_ENERGY: lambda rec: rec.e_abs_j,
    ObjectiveKind.PEAK_FORCE: lambda rec: rec.f_peak_kn,
    ObjectiveKind.MEAN_FORCE: lambda rec: rec.f_mean_kn,
}


def register_objective(kind: ObjectiveKind,
                       extractor: Callable[[SimulationRecord], float]) -> None:
    """Extend the extraction registry with a tailor-made metric."""
    _OBJECTIVE_REGISTRY[kind] = extractor


def coerce_objective(name: str | ObjectiveKind) -> ObjectiveKind:
    try:
        return ObjectiveKind(name)
    except ValueError:
        known = ", ".join(k.value for k in _OBJECTIVE_REGISTRY)
        raise UnknownObjectiveError(
            f"unknown objective '{name}' (known: {known})"
        ) from None


# ---------------------------------------------------------------------------
# problem instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemInstance:
    """Immutable definition of one benchmark configuration."""

    id: ProblemId
    d: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    objectives: tuple[ObjectiveKind, ...]
    solver_mode: SolverMode = SolverMode.MOCK

    @property
    def constraint_limit_mm(self) -> float | None:
        return INTRUSION_LIMITS_MM[self.id]


@dataclass(frozen=True)
class EvaluationResult:
    raw: dict[ObjectiveKind, float]
    feasible: bool
    intrusion_mm: float
    mass_kg: float
    x_normalized: tuple[float, ...]
    x_physical: tuple[float, ...]
    work_dir: str


def bounds_for(problem: ProblemId | int, d: int):
    """Physical lower/upper bound vectors (mm) for one problem and
    dimension; raises DimensionError outside the supported range."""
    problem = ProblemId(problem)
    return _BOUNDS_FN[problem](d)


def create_problem(problem: ProblemId | int, d: int,
                   objectives=None,
                   solver_mode: SolverMode = SolverMode.MOCK
                   ) -> ProblemInstance:
    """Build a problem instance from its number, dimension, requested
    objective list and solver mode."""
    problem = ProblemId(problem)
    lo, hi = bounds_for(problem, d)
    if objectives is None:
        kinds = DEFAULT_OBJECTIVES[problem]
    else:
        if isinstance(objectives, (str, ObjectiveKind)):
            objectives = [objectives]
        kinds = tuple(coerce_objective(o) for o in objectives)
        if not kinds:
            raise UnknownObjectiveError("objective list must be non-empty")
    return ProblemInstance(problem, int(d), tuple(lo.tolist()),
                           tuple(hi.tolist()), kinds, solver_mode)


def _check_normalized(p: ProblemInstance, x_norm) -> np.ndarray:
    x = np.asarray(x_norm, dtype=float)
    if x.shape != (p.d,):
        raise DomainError(f"expected {p.d} components, got shape {x.shape}")
    if np.any(~np.isfinite(x)):
        raise DomainError("design vector contains non-finite components")
    bad = (x < NORM_LO) | (x > NORM_HI)
    if bad.any():
        i = int(np.argmax(bad))
        raise DomainError(
            f"normalized component {i + 1} = {x[i]} outside "
            f"[{NORM_LO}, {NORM_HI}] (no silent clamping)"
        )
    return x


def denormalize(p: ProblemInstance, x_norm) -> np.ndarray:
    """Affine map from the normalized domain [-5, 5]^d to physical mm."""
    x = _check_normalized(p, x_norm)
    lo = np.asarray(p.lower)
    hi = np.asarray(p.upper)
    return lo + (x - NORM_LO) / (NORM_HI - NORM_LO) * (hi - lo)


def normalize(p: ProblemInstance, x_phys) -> np.ndarray:
    """Inverse of :func:`denormalize`."""
    x = np.asarray(x_phys, dtype=float)
    if x.shape != (p.d,):
        raise DomainError(f"expected {p.d} components, got shape {x.shape}")
    lo = np.asarray(p.lower)
    hi = np.asarray(p.upper)
    if np.any(x < lo - 1e-9) or np.any(x > hi + 1e-9):
        raise DomainError("physical vector outside problem bounds")
    return NORM_LO + (x - lo) / (hi - lo) * (NORM_HI - NORM_LO)


def build_geometry(p: ProblemInstance, x_phys):
    """Parameterize and mesh one design; returns (mesh, mass_report)."""
    mat = material_for(p.id)
    if p.id is ProblemId.STAR_BOX:
        cs, profile = par.starbox_geometry(p.d, x_phys)
        mesh = mesh_starbox(cs, profile)
    elif p.id is ProblemId.THREE_POINT_BENDING:
        mesh = mesh_beam(par.beam_rib_layout(p.d, x_phys))
    else:
        mesh = mesh_crashtube(par.trigger_mapping(p.d, x_phys))
    return mesh, compute_mass(mesh, mat.rho_kg_m3)


def evaluate(p: ProblemInstance, x_norm, *,
             work_dir: str | Path | None = None,
             keep_workdir: bool = False,
             cores: int = 1,
             solver_path: str | None = None,
             timeout_s: float = DEFAULT_TIMEOUT_S,
             write_vtk: bool = False,
             onset_fraction: float = DEFAULT_ONSET_FRACTION
             ) -> EvaluationResult:
    """Run the full pipeline for one normalized design vector.

    denormalize -> parameterize -> mesh -> deck -> solve -> post-process
    -> objectives.  Each call owns a private working directory; on
    success it is removed unless ``keep_workdir`` is set, on failure it
    is preserved for inspection.
    """
    x = _check_normalized(p, x_norm)
    x_phys = denormalize(p, x)

    if work_dir is None:
        work_dir = tempfile.mkdtemp(prefix=f"crashbench_p{int(p.id)}_")
        owned = True
    else:
        work_dir = str(work_dir)
        Path(work_dir).mkdir(parents=True, exist_ok=True)
        owned = False

    try:
        mesh, mass = build_geometry(p, x_phys)
        mat = material_for(p.id)
        cfg = sim_config_for(p.id)
        case = f"p{int(p.id)}_d{p.d}"
        deck = build_deck(mesh, mat, cfg, case)
        length_mm, free_mm = _MOCK_GEOMETRY[p.id]
        job = SolverJob(
            work_dir=Path(work_dir), deck=deck, case=case, cores=cores,
            timeout_s=timeout_s, mode=p.solver_mode,
            solver_path=solver_path, write_vtk=write_vtk,
            mock_inputs=MockInputs(mass.total_kg, mat.sigma_y_mpa,
                                   mat.rho_kg_m3, length_mm, free_mm),
            sim_config=cfg,
        )
        out = run(job)
        if out.exit_status is not ExitStatus.OK:
            raise SolverError(
                f"solver {out.exit_status.value}: {out.log_excerpt[-400:]}"
            )
        th = parse_time_history(out.time_history_csv.read_bytes())
        rec = extract_scalars(th, mass.total_kg, onset_fraction)
        limit = p.constraint_limit_mm
        raw = {kind: float(_OBJECTIVE_REGISTRY[kind](rec))
               for kind in p.objectives}
    except CrashBenchError as exc:
        # keep whatever was produced and point the caller at it
        exc.args = (f"{exc} [working directory preserved: {work_dir}]",)
        raise
    if owned and not keep_workdir:
        shutil.rmtree(work_dir, ignore_errors=True)
    return EvaluationResult(
        raw=raw,
        feasible=bool(limit is None or rec.delta_mm <= limit),
        intrusion_mm=rec.delta_mm,
        mass_kg=rec.m_s_kg,
        x_normalized=tuple(x.tolist()),
        x_physical=tuple(np.asarray(x_phys).tolist()),
        work_dir=str(work_dir),
    )
