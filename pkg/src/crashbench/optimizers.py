"""Baseline optimizers and standardized run logging.

Two deliberately simple baselines are shipped: pure random search and a
(1+1) evolution strategy with the 1/5th-success step-size rule.  Both
work on the normalized domain [-5, 5]^d, are fully determined by their
seed, and log one CSV row per evaluation (written incrementally, so a
crashed run keeps everything evaluated so far).

Log format: ``# key=value`` header lines, then a CSV body with columns
``eval, y, best, x1..xd`` where ``best`` is the running minimum of the
raw objective.  Wall-clock timestamps go to a ``.meta.json`` sidecar so
the log itself is bit-reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import CrashBenchError
from .problems import NORM_HI, NORM_LO

ALGORITHMS = ("random-search", "one-plus-one-es")

# 1/5th-success rule: expand the step on success, shrink on failure so
# that ~1/5 successes keeps the step stationary.
ES_INITIAL_STEP = 1.0
ES_EXPAND = 1.5
ES_SHRINK = 1.5 ** -0.25


@dataclass
class RunRecord:
    index: int
    y: float
    best: float
    x: tuple[float, ...]


def _log_header(meta: dict) -> str:
    return "".join(f"# {k}={v}\n" for k, v in meta.items())


def parse_log_header(text: str) -> dict:
    """Recover the run configuration from a log file (round-trip aid)."""
    meta = {}
    for line in text.splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition("=")
        meta[key] = value
    return meta


class RunLogger:
    """Incremental, crash-safe run log writer."""

    def __init__(self, path: Path, meta: dict, dim: int):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        cols = ",".join(["eval", "y", "best"] + [f"x{i+1}" for i in range(dim)])
        self._fh = open(self.path, "w")
        self._fh.write(_log_header(meta))
        self._fh.write(cols + "\n")
        self._fh.flush()
        self._t0 = time.time()

    def append(self, rec: RunRecord):
        row = [str(rec.index), repr(rec.y), repr(rec.best)]
        row += [repr(v) for v in rec.x]
        self._fh.write(",".join(row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()
        sidecar = self.path.with_suffix(self.path.suffix + ".meta.json")
        sidecar.write_text(json.dumps({
            "started_unix": self._t0,
            "finished_unix": time.time(),
            "log": self.path.name,
        }, indent=2) + "\n")


def run_optimization(
    objective: Callable[[np.ndarray], float],
    dim: int,
    budget: int,
    seed: int,
    algorithm: str = "random-search",
    logger: RunLogger | None = None,
) -> RunRecord:
    """Run one budgeted minimization and return the best record.

    ``objective`` maps a normalized design vector to the raw objective
    value; evaluation errors are logged as NaN rows and do not count
    toward the best.  The run aborts if more than half the budget fails
    consecutively.
    """
    if budget < 1:
        raise CrashBenchError(f"budget must be >= 1, got {budget}")
    if algorithm not in ALGORITHMS:
        raise CrashBenchError(
            f"unknown algorithm '{algorithm}' (choose from {ALGORITHMS})"
        )
    rng = np.random.default_rng(seed)
    best = RunRecord(0, np.inf, np.inf, ())
    parent: np.ndarray | None = None
    parent_y = np.inf
    step = ES_INITIAL_STEP
    consecutive_failures = 0

    for k in range(1, budget + 1):
        if algorithm == "random-search" or parent is None:
            x = rng.uniform(NORM_LO, NORM_HI, size=dim)
        else:
            x = np.clip(parent + step * rng.standard_normal(dim),
                        NORM_LO, NORM_HI)
        try:
            y = float(objective(x))
            consecutive_failures = 0
        except CrashBenchError:
            consecutive_failures += 1
            y = float("nan")
            if consecutive_failures > budget / 2:
                if logger is not None:
                    logger.append(RunRecord(k, y, best.best, tuple(x)))
                raise
        if np.isfinite(y) and y < best.best:
            best = RunRecord(k, y, y, tuple(x.tolist()))
        if algorithm == "one-plus-one-es" and np.isfinite(y):
            if parent is None:
                parent, parent_y = x, y
            elif y <= parent_y:
                parent, parent_y = x, y
                step *= ES_EXPAND
            else:
                step *= ES_SHRINK
        if logger is not None:
            logger.append(RunRecord(k, y, best.best, tuple(x.tolist())))
    return best
