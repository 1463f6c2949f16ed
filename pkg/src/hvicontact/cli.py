"""Command line entry point and benchmark orchestration.

    hvicontact solve <config-path> [--preset wall-left|wall-right] [--mesh N]
                                   [--epsilon X] [--out DIR]

Writes ``trace_n<k>.csv`` per mesh level, ``convergence.csv`` and
``report.json`` into the output directory.  Exit status 0 when every level
converged, 2 when the load compatibility check fails, 1 on any other failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from .analysis import check_existence, compare_levels, RefinementRow
from .config import PRESETS, ProblemConfig, parse_config
from .errors import ConfigurationError
from .mesh import build_unit_square_mesh, tag_boundary

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = "1"
TRACE_HEADER = "s,u1,u2,minus_sigma_t,sigma_n"
CONVERGENCE_HEADER = "n,dofs,iterations,merit,max_diff_u1"


def _num(x):
    return format(float(x), ".12g")


def _jsonable(obj):
    """Numbers become decimal strings with 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_trace_csv(path, trace):
    lines = [TRACE_HEADER]
    lines += [",".join(f"{v:.8e}" for v in row) for row in trace.rows()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_convergence_csv(path, rows):
    lines = [CONVERGENCE_HEADER]
    for r in rows:
        diff = "nan" if math.isnan(r.max_diff_u1) else f"{r.max_diff_u1:.8e}"
        lines.append(f"{r.n},{r.dofs},{r.iterations},{r.merit:.8e},{diff}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _config_dict(config: ProblemConfig):
    return {
        "preset": config.preset,
        "youngs_modulus": config.material.youngs_modulus,
        "poisson_ratio": config.material.poisson_ratio,
        "P": config.loads.P,
        "Q": config.loads.Q,
        "p_sign": config.loads.sign,
        "delta": config.law.delta,
        "gamma1": config.law.gamma1,
        "gamma2": config.law.gamma2,
        "epsilon": config.eps,
        "n_list": list(config.n_list),
        "boundary": {
            tag: [f"{s.side}:{s.start:g}:{s.stop:g}" for s in segs]
            for tag, segs in config.boundary.segments.items()
        },
        "max_iterations": config.solver.max_iterations,
        "merit_tolerance": config.solver.merit_tolerance,
    }


def run_benchmark(config: ProblemConfig, out_dir=None):
    """Existence check, then solve every mesh level and write the artifacts.

    Returns ``(exit_status, report_dict)``.  Artifacts written before a
    failure are kept; ``report["failed_stage"]`` names the stage that failed.
    """
    from .pipeline import solve_level

    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": _config_dict(config),
        "existence": None,
        "levels": [],
        "convergence": [],
        "failed_stage": None,
        "error": None,
        "exit_status": None,
    }
    stage = "existence"
    status = 1
    try:
        mesh = tag_boundary(build_unit_square_mesh(min(config.n_list)), config.boundary)
        existence = check_existence(mesh, config.loads, config.law)
        report["existence"] = existence.as_dict()
        if not existence.verdict:
            report["failed_stage"] = "existence"
            report["error"] = existence.message
            status = 2
            return status, report
        levels = []
        for n in config.n_list:
            stage = f"solve n={n}"
            lev = solve_level(config, n)
            levels.append(lev)
            write_trace_csv(out / f"trace_n{n}.csv", lev.trace)
            entry = {"n": n, "contact_dofs": lev.partition.num_contact}
            entry.update(lev.report.as_dict())
            report["levels"].append(entry)
        stage = "convergence"
        rows = []
        for k, lev in enumerate(levels):
            row = RefinementRow(
                lev.n, lev.partition.num_contact, lev.report.iterations, lev.report.merit, lev.report.converged
            )
            if k + 1 < len(levels):
                row.max_diff_u1, row.energy_diff = compare_levels(lev, levels[k + 1])
            rows.append(row)
        write_convergence_csv(out / "convergence.csv", rows)
        report["convergence"] = [vars(r) for r in rows]
        failed = [lev.n for lev in levels if not lev.report.converged]
        if failed:
            report["failed_stage"] = "solve"
            report["error"] = f"levels {failed} did not converge"
            status = 1
        else:
            status = 0
    except Exception as exc:  # recorded in the report, not swallowed
        report["failed_stage"] = stage
        report["error"] = f"{type(exc).__name__}: {exc}"
        log.debug("stage %s failed\n%s", stage, traceback.format_exc())
        status = 1
    finally:
        report["exit_status"] = status
        (out / "report.json").write_text(
            json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n", encoding="utf-8", newline="\n"
        )
    return status, report


def build_parser():
    parser = argparse.ArgumentParser(prog="hvicontact", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="run the contact benchmark from a configuration file")
    solve.add_argument("config", help="path of the configuration file")
    solve.add_argument("--preset", choices=sorted(PRESETS))
    solve.add_argument("--mesh", type=int, help="single mesh level, divisions per side")
    solve.add_argument("--epsilon", type=float, help="smoothing parameter")
    solve.add_argument("--out", help="output directory")
    solve.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = parse_config(args.config, preset=args.preset, mesh=args.mesh, epsilon=args.epsilon, out_dir=args.out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    status, report = run_benchmark(config)
    if status == 2:
        print(f"existence check failed: {report['error']}", file=sys.stderr)
    elif status:
        print(f"stage {report['failed_stage']} failed: {report['error']}", file=sys.stderr)
    else:
        for lev in report["levels"]:
            print(f"n={lev['n']}: converged in {lev['iterations']} iterations, merit {lev['merit']}")
    return status


if __name__ == "__main__":
    sys.exit(main())
