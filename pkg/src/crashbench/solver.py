"""Simulation-stage orchestration: external solver subprocesses or the
built-in deterministic mock.

The mock replaces a multi-minute explicit FE solve with a closed-form
rigid-plastic crush model so the whole pipeline stays testable at desk
scale.  It keeps the qualitative behavior optimizers rely on: heavier /
thicker designs resist more and intrude less, the force trace has a
contact spike so load uniformity exceeds one, and energy is conserved
exactly.
"""

from __future__ import annotations

import os
import shutil
import signal
import subprocess
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .decks import DeckBundle, SimConfig, TH_SAMPLE_MS, write_deck_files
from .errors import MissingOutputError, SolverSpawnError, SolverTimeoutError
from .postprocess import TimeHistory, serialize_time_history

SOLVER_PATH_ENV = "CRASHBENCH_SOLVER"
DEFAULT_TIMEOUT_S = 4000.0  # ~2x the slowest observed single-core solve


class SolverMode(Enum):
    MOCK = "mock"
    EXTERNAL = "external"


class ExitStatus(Enum):
    OK = "ok"
    FAILED = "failed"
    TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class MockInputs:
    """Closed-form surrogate inputs derived from the meshed design."""

    structural_mass_kg: float
    sigma_y_mpa: float
    rho_kg_m3: float
    extrusion_length_mm: float  # axial length that sets the load-bearing area
    free_length_mm: float       # crushable length capping the intrusion


@dataclass(frozen=True)
class SolverJob:
    work_dir: Path
    deck: DeckBundle
    case: str = "case"
    cores: int = 1
    timeout_s: float = DEFAULT_TIMEOUT_S
    mode: SolverMode = SolverMode.MOCK
    solver_path: str | None = None
    write_vtk: bool = False
    mock_inputs: MockInputs | None = None
    sim_config: SimConfig | None = None


@dataclass(frozen=True)
class SolverOutput:
    time_history_csv: Path
    exit_status: ExitStatus
    log_excerpt: str = ""


def mock_surrogate(mock: MockInputs, cfg: SimConfig) -> TimeHistory:
    """Deterministic crush surrogate sampled every 0.1 ms.

    A constant plastic resistance R = sigma_y * A_eff decelerates the
    impactor (A_eff is the average load-bearing section m_s / (rho * L)).
    Intrusion stops at KE0 / R or at 90% of the crushable length.  The
    reported force trace is a half-sine of peak 1.8 R over the crush
    interval with a one-sample 2.2 R contact spike; internal energy ramps
    to min(KE0, R * delta) and kinetic energy is the exact complement.
    """
    t = np.round(np.arange(0.0, cfg.sim_time_ms + TH_SAMPLE_MS / 2,
                           TH_SAMPLE_MS), 6)
    v0 = cfg.impactor_velocity_mm_ms
    m_i = cfg.impactor_mass_kg
    ke0 = cfg.impactor_kinetic_energy_j

    # mm-ms-kg units: sigma [GPa] * area [mm^2] -> force [kN]
    area_eff = mock.structural_mass_kg / (
        mock.rho_kg_m3 * 1e-9 * mock.extrusion_length_mm
    )
    resistance_kn = (mock.sigma_y_mpa / 1000.0) * area_eff

    zeros = np.zeros_like(t)
    if v0 <= 0.0 or resistance_kn <= 0.0:
        return TimeHistory(t, zeros, zeros, zeros, np.full_like(t, ke0))

    delta_cap = 0.9 * mock.free_length_mm
    decel = resistance_kn / m_i  # mm/ms^2
    t_stop = v0 / decel
    if ke0 / resistance_kn <= delta_cap:
        t_crush = t_stop
    else:
        # first time the impactor reaches the cap, still moving
        t_crush = (v0 - np.sqrt(v0**2 - 2.0 * decel * delta_cap)) / decel
    t_crush = min(t_crush, float(t[-1]))

    t_clip = np.minimum(t, t_crush)
    disp = v0 * t_clip - 0.5 * decel * t_clip**2
    internal = resistance_kn * disp
    kinetic = ke0 - internal

    force = np.where(
        (t > 0.0) & (t <= t_crush),
        1.8 * resistance_kn * np.sin(np.pi * np.minimum(t / t_crush, 1.0)),
        0.0,
    )
    if t_crush > 0.0:
        force[0] = 2.2 * resistance_kn
    return TimeHistory(t, force, disp, internal, kinetic)


def _time_history_path(work_dir: Path, case: str) -> Path:
    return Path(work_dir) / f"{case}_th.csv"


def _resolve_external_commands(job: SolverJob) -> list[list[str]]:
    """Starter and engine invocations for the external solver.

    ``solver_path`` (or $CRASHBENCH_SOLVER) points at the starter
    executable; the engine executable is derived by the conventional
    starter->engine name substitution, falling back to the same binary.
    """
    exe = job.solver_path or os.environ.get(SOLVER_PATH_ENV)
    if not exe:
        raise SolverSpawnError("no solver path given (flag or "
                               f"${SOLVER_PATH_ENV})")
    starter = Path(exe)
    if not starter.exists() and shutil.which(str(starter)) is None:
        raise SolverSpawnError(f"solver binary not found: {starter}")
    engine = starter.with_name(starter.name.replace("starter", "engine"))
    if "starter" not in starter.name or not engine.exists():
        engine = starter
    cmds = [
        [str(starter), "-i", f"{job.case}_0000.rad", "-nt", str(job.cores)],
        [str(engine), "-i", f"{job.case}_0001.rad", "-nt", str(job.cores)],
    ]
    if job.write_vtk:
        cmds[1].append("-vtk")
    return cmds


def _run_external(job: SolverJob) -> SolverOutput:
    cmds = _resolve_external_commands(job)
    env = dict(os.environ, OMP_NUM_THREADS=str(job.cores))
    log_tail = ""
    for cmd in cmds:
        try:
            proc = subprocess.Popen(
                cmd, cwd=job.work_dir, env=env,
                stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
                start_new_session=True,
            )
        except OSError as exc:
            raise SolverSpawnError(f"cannot spawn {cmd[0]}: {exc}") from exc
        try:
            out, _ = proc.communicate(timeout=job.timeout_s)
        except subprocess.TimeoutExpired:
            os.killpg(proc.pid, signal.SIGKILL)
            proc.wait()
            raise SolverTimeoutError(
                f"{cmd[0]} exceeded {job.timeout_s} s and was killed"
            ) from None
        log_tail = out.decode(errors="replace")[-2000:]
        if proc.returncode != 0:
            return SolverOutput(_time_history_path(job.work_dir, job.case),
                                ExitStatus.FAILED, log_tail)
    csv_path = _time_history_path(job.work_dir, job.case)
    if not csv_path.exists():
        raise MissingOutputError(f"solver produced no {csv_path.name}")
    return SolverOutput(csv_path, ExitStatus.OK, log_tail)


def run(job: SolverJob) -> SolverOutput:
    """Execute one simulation job inside its private working directory."""
    work_dir = Path(job.work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    write_deck_files(job.deck, work_dir, job.case)

    if job.mode is SolverMode.MOCK:
        if job.mock_inputs is None or job.sim_config is None:
            raise SolverSpawnError("mock mode needs mock_inputs and sim_config")
        th = mock_surrogate(job.mock_inputs, job.sim_config)
        csv_path = _time_history_path(work_dir, job.case)
        csv_path.write_text(serialize_time_history(th))
        return SolverOutput(csv_path, ExitStatus.OK, "mock solver")
    return _run_external(job)
