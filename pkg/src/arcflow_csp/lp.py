"""Two-phase primal simplex for ``min c x  s.t.  A x (>= | =) b,  l <= x <= u``.

The solver is a revised simplex that keeps a dense basis inverse and prices
against sparse columns. Pricing is Dantzig's rule; after ``5 (rows + cols)``
consecutive iterations without objective progress it falls back to Bland's
rule, which cannot cycle.

Finite lower bounds are shifted out; finite upper bounds become extra
``-x_j >= -u_j`` rows whose duals are not reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.sparse as sp

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 200

GE = ">="
EQ = "="


class LpError(ValueError):
    pass


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class Column:
    rows: tuple[int, ...]
    coefs: tuple[float, ...]

    @classmethod
    def from_dense(cls, values: Sequence[float]) -> "Column":
        nz = [(r, float(v)) for r, v in enumerate(values) if v != 0]
        return cls(tuple(r for r, _ in nz), tuple(v for _, v in nz))

    @classmethod
    def from_pairs(cls, pairs) -> "Column":
        acc: dict[int, float] = {}
        for r, v in pairs:
            acc[r] = acc.get(r, 0.0) + float(v)
        rows = sorted(r for r, v in acc.items() if v != 0)
        return cls(tuple(rows), tuple(acc[r] for r in rows))


@dataclass(frozen=True)
class LinearProgram:
    n_rows: int
    senses: tuple[str, ...]
    rhs: tuple[float, ...]
    columns: tuple[Column, ...] = ()
    costs: tuple[float, ...] = ()
    lower: tuple[float, ...] = ()
    upper: tuple[float | None, ...] = ()

    def __post_init__(self):
        if len(self.senses) != self.n_rows or len(self.rhs) != self.n_rows:
            raise LpError("senses/rhs length must equal n_rows")
        if any(s not in (GE, EQ) for s in self.senses):
            raise LpError("row senses must be '>=' or '='")
        if not np.all(np.isfinite(self.rhs)):
            raise LpError("rhs must be finite")
        n = len(self.columns)
        if len(self.costs) != n:
            raise LpError("one cost per column required")
        if not self.lower:
            object.__setattr__(self, "lower", (0.0,) * n)
        if not self.upper:
            object.__setattr__(self, "upper", (None,) * n)
        if len(self.lower) != n or len(self.upper) != n:
            raise LpError("bounds length must equal the column count")
        for col in self.columns:
            _check_column(col, self.n_rows)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def matrix(self) -> sp.csc_matrix:
        data, indices, indptr = [], [], [0]
        for col in self.columns:
            indices.extend(col.rows)
            data.extend(col.coefs)
            indptr.append(len(indices))
        return sp.csc_matrix((np.asarray(data, float), np.asarray(indices, int), indptr),
                             shape=(self.n_rows, self.n_cols))

    def with_bounds(self, lower, upper) -> "LinearProgram":
        return replace(self, lower=tuple(lower), upper=tuple(upper))


def _check_column(col: Column, n_rows: int):
    if len(col.rows) != len(col.coefs):
        raise LpError("column rows/coefs length mismatch")
    if any(b <= a for a, b in zip(col.rows, col.rows[1:])):
        raise LpError("column row indices must be strictly increasing")
    if col.rows and (col.rows[0] < 0 or col.rows[-1] >= n_rows):
        raise LpError(f"bad row index in column {col.rows}")
    if not all(np.isfinite(col.coefs)):
        raise LpError("column coefficients must be finite")


def add_column(lp: LinearProgram, column: Column, cost: float,
               lower: float = 0.0, upper: float | None = None) -> LinearProgram:
    _check_column(column, lp.n_rows)
    return replace(lp, columns=lp.columns + (column,), costs=lp.costs + (float(cost),),
                   lower=lp.lower + (lower,), upper=lp.upper + (upper,))


@dataclass
class LpSolution:
    status: Status
    objective: float = float("nan")
    primal: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Simplex:
    """Revised simplex state over ``A x = b, x >= 0`` with ``b >= 0``."""

    def __init__(self, A: sp.csc_matrix, b: np.ndarray, basis: list[int], rule: str, max_iters: int):
        self.A = A
        self.AT = A.T.tocsr()
        self.b = b
        self.R, self.N = A.shape
        self.basis = np.asarray(basis, dtype=int)
        self.rule = rule
        self.max_iters = max_iters
        self.iterations = 0
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis].toarray()
        self.Binv = np.linalg.inv(B)
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-12] = 0.0
        self.since_refactor = 0

    def column(self, j: int) -> np.ndarray:
        lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
        return self.Binv[:, self.A.indices[lo:hi]] @ self.A.data[lo:hi]

    def pivot(self, r: int, q: int, alpha: np.ndarray):
        theta = self.xB[r] / alpha[r]
        self.xB -= theta * alpha
        self.xB[r] = theta
        self.xB[(self.xB < 0) & (self.xB > -FEAS_TOL)] = 0.0
        prow = self.Binv[r] / alpha[r]
        nz = np.flatnonzero(alpha)
        nz = nz[nz != r]
        if nz.size:
            self.Binv[nz] -= np.outer(alpha[nz], prow)
        self.Binv[r] = prow
        self.basis[r] = q
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def run(self, c: np.ndarray, allowed: np.ndarray) -> Status:
        rule = self.rule
        best = np.inf
        stall = 0
        stall_limit = 5 * (self.R + self.N)
        while True:
            cB = c[self.basis]
            y = cB @ self.Binv
            d = c - self.AT @ y
            d[self.basis] = 0.0
            cand = np.flatnonzero(allowed & (d < -OPT_TOL))
            if cand.size == 0:
                return Status.OPTIMAL
            if self.iterations >= self.max_iters:
                return Status.ITERATION_LIMIT
            obj = float(cB @ self.xB)
            if obj < best - 1e-12:
                best, stall = obj, 0
            else:
                stall += 1
                if stall > stall_limit:
                    rule = "bland"
            if rule == "bland":
                q = int(cand[0])
            else:
                q = int(cand[np.argmin(d[cand])])
            alpha = self.column(q)
            pos = np.flatnonzero(alpha > PIVOT_TOL)
            if pos.size == 0:
                return Status.UNBOUNDED
            ratios = self.xB[pos] / alpha[pos]
            tmin = ratios.min()
            ties = pos[ratios <= tmin + 1e-12]
            if rule == "bland":
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(alpha[ties])])
            self.pivot(r, q, alpha)
            self.iterations += 1


def solve_lp(lp: LinearProgram, max_iters: int = 200_000, rule: str = "dantzig") -> LpSolution:
    """Solve ``lp`` to optimality, returning primal values and row duals.

    ``rule`` is ``"dantzig"`` (with automatic Bland fallback) or ``"bland"``.
    """
    if rule not in ("dantzig", "bland"):
        raise LpError(f"unknown pivot rule {rule!r}")
    n, m0 = lp.n_cols, lp.n_rows
    lower = np.asarray(lp.lower, float)
    c = np.asarray(lp.costs, float)
    A0 = lp.matrix()
    b0 = np.asarray(lp.rhs, float) - A0 @ lower
    senses = list(lp.senses)

    # upper bounds: -x'_j >= -(u_j - l_j)
    ub = [(j, u - lower[j]) for j, u in enumerate(lp.upper) if u is not None]
    if any(span < -FEAS_TOL for _, span in ub):
        return LpSolution(Status.INFEASIBLE)
    if ub:
        rows = sp.csc_matrix((-np.ones(len(ub)), ([k for k in range(len(ub))], [j for j, _ in ub])),
                             shape=(len(ub), n))
        A0 = sp.vstack([A0, rows], format="csc")
        b0 = np.concatenate([b0, [-span for _, span in ub]])
        senses += [GE] * len(ub)
    R = len(senses)

    ge_rows = [r for r, s in enumerate(senses) if s == GE]
    n_surplus = len(ge_rows)
    surplus = sp.csc_matrix((-np.ones(n_surplus), (ge_rows, range(n_surplus))), shape=(R, n_surplus))
    sign = np.where(b0 < 0, -1.0, 1.0)
    D = sp.diags(sign)
    A = sp.hstack([D @ A0, D @ surplus, sp.identity(R, format="csc")], format="csc")
    b = np.abs(b0)
    art0 = n + n_surplus
    N = art0 + R

    # start from a surplus column where it already forms a unit column, else an artificial
    basis = list(range(art0, N))
    for k, r in enumerate(ge_rows):
        if sign[r] < 0:
            basis[r] = n + k
    simplex = _Simplex(A, b, basis, rule, max_iters)
    allowed = np.ones(N, dtype=bool)

    needs_phase1 = any(j >= art0 for j in basis)
    if needs_phase1:
        c1 = np.zeros(N)
        c1[art0:] = 1.0
        status = simplex.run(c1, allowed)
        if status is Status.ITERATION_LIMIT:
            return LpSolution(status, iterations=simplex.iterations)
        infeas = float(c1[simplex.basis] @ simplex.xB)
        if infeas > FEAS_TOL * max(1.0, float(b.max(initial=0.0))):
            return LpSolution(Status.INFEASIBLE, iterations=simplex.iterations)
        _drive_out_artificials(simplex, art0)
    allowed[art0:] = False

    c2 = np.zeros(N)
    c2[:n] = c
    status = simplex.run(c2, allowed)
    if status is not Status.OPTIMAL:
        return LpSolution(status, iterations=simplex.iterations)
    simplex.refactor()
    x = np.zeros(N)
    x[simplex.basis] = np.maximum(simplex.xB, 0.0)
    primal = x[:n] + lower
    y = (c2[simplex.basis] @ simplex.Binv) * sign
    objective = float(c @ primal)
    return LpSolution(Status.OPTIMAL, objective, primal, y[:m0], simplex.iterations)


def _drive_out_artificials(simplex: _Simplex, art0: int):
    for r in range(simplex.R):
        if simplex.basis[r] < art0:
            continue
        row = simplex.A[:, :art0].T @ simplex.Binv[r]
        nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        if nz.size == 0:
            continue  # redundant row; the artificial stays basic at zero
        q = int(nz[np.argmax(np.abs(row[nz]))])
        simplex.pivot(r, q, simplex.column(q))
