"""Single-level solve: mesh, assembly, condensation, MCP solve, trace."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import StressRecovery, Trace, contact_trace, stress_recovery
from .elasticity import AssembledSystem, assemble
from .mcp import McpProblem, SolveReport, solve_trust_region
from .mesh import Mesh, build_unit_square_mesh, tag_boundary
from .reduction import DofPartition, ReducedSystem, partition_dofs, recover_full, schur_condense


@dataclass
class LevelResult:
    n: int
    mesh: Mesh
    system: AssembledSystem
    partition: DofPartition
    reduced: ReducedSystem
    problem: McpProblem
    report: SolveReport
    u: np.ndarray
    trace: Trace
    stress: StressRecovery


def build_level(config, n, eps=None):
    """Everything up to, but not including, the nonlinear solve."""
    eps = config.eps if eps is None else eps
    mesh = tag_boundary(build_unit_square_mesh(n), config.boundary)
    system = assemble(mesh, config.material, config.loads)
    partition = partition_dofs(mesh, system.dof_map)
    reduced = schur_condense(system, partition)
    problem = McpProblem.from_reduced(reduced, config.law, eps)
    return mesh, system, partition, reduced, problem


def solve_level(config, n, eps=None) -> LevelResult:
    eps = config.eps if eps is None else eps
    mesh, system, partition, reduced, problem = build_level(config, n, eps)
    report = solve_trust_region(problem, config.solver)
    u = recover_full(report.solution, reduced)
    return LevelResult(
        n=n,
        mesh=mesh,
        system=system,
        partition=partition,
        reduced=reduced,
        problem=problem,
        report=report,
        u=u,
        trace=contact_trace(u, mesh, system, eps, config.law),
        stress=stress_recovery(u, mesh, config.material),
    )
