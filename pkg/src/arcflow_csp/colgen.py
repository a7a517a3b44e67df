"""Gilmore-Gomory column generation for the LP bound of the 0-1 CSP."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance
from .knapsack import knapsack_pattern
from .lp import GE, Column, LinearProgram, LpSolution, Status, add_column, solve_lp


class ColgenError(RuntimeError):
    pass


@dataclass
class ColumnPool:
    """Binary patterns over the instance's items, all of cost 1."""

    widths: tuple[int, ...]
    capacity: int
    columns: list[tuple[int, ...]] = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)

    def add(self, pattern) -> bool:
        pattern = tuple(int(a) for a in pattern)
        if any(a not in (0, 1) for a in pattern):
            raise ColgenError(f"non-binary pattern {pattern}")
        if sum(a * w for a, w in zip(pattern, self.widths)) > self.capacity:
            raise ColgenError(f"pattern {pattern} exceeds the capacity")
        if pattern in self._seen:
            return False
        self._seen.add(pattern)
        self.columns.append(pattern)
        return True

    def __contains__(self, pattern) -> bool:
        return tuple(pattern) in self._seen

    def __len__(self) -> int:
        return len(self.columns)


@dataclass
class ColgenResult:
    z_lp: float
    n_columns: int  # columns in the final master, singletons included
    n_generated: int
    iterations: int
    duals: np.ndarray
    pool: ColumnPool
    history: list[float]
    primal: np.ndarray
    degenerate: bool = False


def _master(inst: Instance) -> LinearProgram:
    return LinearProgram(inst.m, (GE,) * inst.m, tuple(float(b) for b in inst.demands))


def solve_root(inst: Instance, tol: float = 1e-7, max_iters: int | None = None,
               initial_columns=()) -> ColgenResult:
    """Solve the LP relaxation of the pattern model by column generation.

    The master starts from one singleton pattern per item (plus any
    ``initial_columns``); each round adds the single best knapsack pattern
    while its reduced cost is below ``-tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, W = inst.m, inst.capacity
    widths = inst.widths
    if max_iters is None:
        max_iters = 10 * m + 1000
    pool = ColumnPool(tuple(widths), W)
    lp = _master(inst)
    for k in range(m):
        pool.add([int(j == k) for j in range(m)])
        lp = add_column(lp, Column((k,), (1.0,)), 1.0)
    for pattern in initial_columns:
        if pool.add(pattern):
            lp = add_column(lp, Column.from_dense(pattern), 1.0)
    n_start = len(pool)

    history: list[float] = []
    degenerate = False
    iterations = 0
    while True:
        sol = _solve_master(lp)
        history.append(sol.objective)
        profit, pattern = knapsack_pattern(widths, sol.duals, W)
        if 1.0 - profit >= -tol:
            break
        if pattern in pool:
            # degenerate duals: retry once with Bland's rule before giving up
            sol = _solve_master(lp, rule="bland")
            history[-1] = sol.objective
            profit, pattern = knapsack_pattern(widths, sol.duals, W)
            if 1.0 - profit >= -tol:
                break
            if pattern in pool:
                degenerate = True
                break
        if iterations >= max_iters:
            raise ColgenError(f"column generation did not converge in {max_iters} iterations")
        pool.add(pattern)
        lp = add_column(lp, Column.from_dense(pattern), 1.0)
        iterations += 1

    return ColgenResult(
        z_lp=sol.objective,
        n_columns=len(pool),
        n_generated=len(pool) - n_start,
        iterations=iterations,
        duals=sol.duals,
        pool=pool,
        history=history,
        primal=sol.primal,
        degenerate=degenerate,
    )


def _solve_master(lp: LinearProgram, rule: str = "dantzig") -> LpSolution:
    sol = solve_lp(lp, rule=rule)
    if sol.status is not Status.OPTIMAL:
        raise ColgenError(f"restricted master not solved: {sol.status.value}")
    return sol
