"""Command-line harness.

The CLI is a thin client of the evaluation service: every evaluation goes
through the HTTP API, either against a remote server (``--server URL``)
or against an in-process instance of the same app (the default, no
network involved).  Exit codes: 0 ok, 2 usage error, 3 solver failure,
4 parse failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import sys
from pathlib import Path

import httpx

from . import __version__
from .errors import CrashBenchError, ParseError, SolverError
from .optimizers import ALGORITHMS, RunLogger, run_optimization
from .problems import DEFAULT_OBJECTIVES, ProblemId

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_PARSE = 4

_EXIT_OF_CATEGORY = {"usage": EXIT_USAGE, "solver": EXIT_SOLVER,
                     "parse": EXIT_PARSE}
_ERROR_OF_CATEGORY = {"usage": CrashBenchError, "solver": SolverError,
                      "parse": ParseError}


class ServiceClient:
    """Minimal synchronous client for the evaluation service."""

    def __init__(self, server: str | None = None):
        if server:
            self._http = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                # starlette's testclient import warns about its httpx
                # backend; not actionable for CLI users
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

            from .service import app

            self._http = TestClient(app)

    def close(self):
        self._http.close()

    def _post(self, path: str, payload: dict) -> dict:
        resp = self._http.post(path, json=payload)
        body = resp.json()
        if resp.status_code >= 400:
            err = body.get("error") or {}
            category = err.get("category", "usage")
            message = err.get("message") or str(body)
            raise _ERROR_OF_CATEGORY.get(category, CrashBenchError)(message)
        return body

    def describe(self, problem: int, dim: int) -> dict:
        return self._post("/problems/describe", {"problem": problem,
                                                 "dim": dim})

    def evaluate(self, payload: dict) -> dict:
        return self._post("/evaluate", payload)


def _evaluate_payload(args, x) -> dict:
    payload = {
        "problem": args.problem,
        "dim": args.dim,
        "x": list(x),
        "mode": "external" if args.solver_path else "mock",
        "cores": args.cores,
        "write_vtk": args.vtk,
    }
    if args.objective:
        payload["objectives"] = args.objective
    if args.solver_path:
        payload["solver_path"] = args.solver_path
    if getattr(args, "keep_workdir", False):
        payload["keep_workdir"] = True
    return payload


def cmd_evaluate(args) -> int:
    client = ServiceClient(args.server)
    try:
        body = client.evaluate(_evaluate_payload(args, args.x))
    finally:
        client.close()
    lines = [
        f"problem={body['problem']}",
        f"dim={body['dim']}",
        f"feasible={body['feasible']}",
        f"intrusion_mm={body['intrusion_mm']!r}",
        f"mass_kg={body['mass_kg']!r}",
    ]
    for name, value in body["objectives"].items():
        lines.append(f"{name}={value!r}")
    if getattr(args, "keep_workdir", False):
        # only meaningful when the directory survives the call
        lines.append(f"work_dir={body['work_dir']}")
    print("\n".join(lines))
    return EXIT_OK


def _single_run(args, seed: int, out_dir: Path) -> tuple[Path, float]:
    objective_name = (args.objective[0] if args.objective
                      else DEFAULT_OBJECTIVES[ProblemId(args.problem)][0].value)
    mode = "external" if args.solver_path else "mock"
    log_path = out_dir / (
        f"run_p{args.problem}_d{args.dim}_{args.algo}_s{seed}.csv"
    )
    meta = {
        "problem": args.problem,
        "dim": args.dim,
        "objective": objective_name,
        "algo": args.algo,
        "budget": args.budget,
        "seed": seed,
        "mode": mode,
        "version": __version__,
    }
    client = ServiceClient(args.server)
    logger = RunLogger(log_path, meta, args.dim)

    def objective(x):
        body = client.evaluate(_evaluate_payload(args, x))
        return body["objectives"][objective_name]

    try:
        best = run_optimization(objective, args.dim, args.budget, seed,
                                args.algo, logger)
    finally:
        logger.close()
        client.close()
    print(f"log={log_path}")
    print(f"best_y={best.best!r}")
    if best.x:
        print("best_x=" + ",".join(repr(v) for v in best.x))
    return log_path, best.best


def cmd_optimize(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.parallel <= 1:
        _single_run(args, args.seed, out_dir)
        return EXIT_OK
    seeds = [args.seed + i for i in range(args.parallel)]
    with concurrent.futures.ThreadPoolExecutor(args.parallel) as pool:
        futures = [pool.submit(_single_run, args, s, out_dir) for s in seeds]
        for fut in futures:
            fut.result()
    return EXIT_OK


def cmd_describe(args) -> int:
    client = ServiceClient(args.server)
    try:
        body = client.describe(args.problem, args.dim)
    finally:
        client.close()
    for key in ("problem", "dim", "constraint_limit_mm"):
        print(f"{key}={body[key]}")
    print("lower=" + ",".join(repr(v) for v in body["lower"]))
    print("upper=" + ",".join(repr(v) for v in body["upper"]))
    print("default_objectives=" + ",".join(body["default_objectives"]))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--problem", type=int, required=True,
                        choices=[1, 2, 3], help="problem number")
    parser.add_argument("--dim", type=int, required=True,
                        help="problem dimension")
    parser.add_argument("--objective", action="append", default=None,
                        metavar="NAME",
                        help="objective to extract (repeatable; default: "
                             "the problem's penalized objective)")
    solver = parser.add_mutually_exclusive_group()
    solver.add_argument("--mock", action="store_true", default=True,
                        help="use the deterministic mock solver (default)")
    solver.add_argument("--solver-path", default=None, metavar="PATH",
                        help="external solver starter binary "
                             "(or set $CRASHBENCH_SOLVER)")
    parser.add_argument("--cores", type=int, default=1,
                        help="CPU cores for the external solver")
    parser.add_argument("--vtk", action="store_true",
                        help="forward the animation-file flag to the "
                             "external solver")
    parser.add_argument("--server", default=None, metavar="URL",
                        help="remote service URL (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crashbench",
        description="Crashworthiness shape-optimization benchmarks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate one design vector")
    _add_common(ev)
    ev.add_argument("-x", type=float, nargs="+", required=True,
                    metavar="V", help="normalized design vector in [-5,5]^d")
    ev.add_argument("--keep-workdir", action="store_true",
                    help="keep the evaluation working directory")
    ev.set_defaults(func=cmd_evaluate)

    opt = sub.add_parser("optimize", help="run a baseline optimizer")
    _add_common(opt)
    opt.add_argument("--algo", default="random-search", choices=ALGORITHMS)
    opt.add_argument("--budget", type=int, default=50,
                     help="number of evaluations")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--out", default="runs", metavar="DIR",
                     help="directory for run logs")
    opt.add_argument("--parallel", type=int, default=1, metavar="N",
                     help="run N independent seeds concurrently")
    opt.set_defaults(func=cmd_optimize)

    desc = sub.add_parser("describe", help="print bounds and objectives")
    desc.add_argument("--problem", type=int, required=True, choices=[1, 2, 3])
    desc.add_argument("--dim", type=int, required=True)
    desc.add_argument("--server", default=None, metavar="URL")
    desc.set_defaults(func=cmd_describe)

    srv = sub.add_parser("serve", help="run the HTTP evaluation service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8321)
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CrashBenchError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return _EXIT_OF_CATEGORY.get(exc.category, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
