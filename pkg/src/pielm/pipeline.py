"""Basis -> collocation -> roster -> system -> solve."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .basis import ElmBasis, init_basis
from .cases import CaseDefinition, RosterSizes, get_case
from .config import RunConfig, parse_row_scale
from .constraints import DesignSystem, Residual, assemble_system, residual
from .solver import SolveDiagnostics, solve_min_norm


@dataclass(frozen=True, eq=False)
class Solution:
    case: CaseDefinition
    config: RunConfig
    basis: ElmBasis
    system: DesignSystem
    roster: list
    theta: np.ndarray
    diagnostics: SolveDiagnostics
    residual: Residual
    assembly_time: float
    solve_time: float

    def field_weights(self, j: int) -> np.ndarray:
        return self.theta[self.system.block(j)]


def case_for(config: RunConfig) -> CaseDefinition:
    if config.case == 1:
        return get_case(1, include_fixed_neumann=config.include_fixed_neumann)
    return get_case(config.case)


def solve_case(config: RunConfig, case: CaseDefinition = None) -> Solution:
    config = config.resolved()
    case = case or case_for(config)
    t0 = time.perf_counter()
    box = case.domain.bounding_box() if config.normalize_inputs else None
    basis = init_basis(case.dim, config.M, config.seed, (config.weight_lo, config.weight_hi), normalize=box)
    roster = case.build_roster(RosterSizes(config.nc, config.ni, config.nf), config.seed, config.strategy)
    system = assemble_system(basis, roster, case.n_fields, parse_row_scale(config.row_scale))
    t1 = time.perf_counter()
    theta, diag = solve_min_norm(system.matrix, system.rhs, config.rcond)
    t2 = time.perf_counter()
    return Solution(case, config, basis, system, roster, theta, diag, residual(system, theta), t1 - t0, t2 - t1)
