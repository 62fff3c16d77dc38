"""Self-contained dense LP solver in equality standard form, with certificates.

Problems are ``maximize c.z  subject to  A z = b`` where each variable is
either sign-free or constrained nonnegative (``nonneg`` mask).  Solved by
two-phase tableau simplex with Bland's anti-cycling rule; free variables are
split into differences of nonnegative parts.

Every verdict carries a certificate: optimal outcomes return a dual vector
(weak duality and complementary slackness hold within tolerance), infeasible
outcomes return a Farkas vector y with y.A <= 0 on nonnegative columns,
y.A = 0 on free columns, and y.b > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TOL_FEAS

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LpError(RuntimeError):
    """Numerical failure inside the solver (stall that survives perturbation)."""


@dataclass(frozen=True, eq=False)
class LpProblem:
    """maximize c.z subject to A z = b, with z[i] >= 0 where nonneg[i]."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    nonneg: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.A, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError(f"A must be 2-D, got shape {a.shape}")
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        nn = np.asarray(self.nonneg, dtype=bool).reshape(-1)
        m, nvar = a.shape
        if nvar < 1:
            raise ValueError("problem must have at least one variable")
        if b.shape[0] != m:
            raise ValueError(f"b has length {b.shape[0]}, expected {m}")
        if c.shape[0] != nvar or nn.shape[0] != nvar:
            raise ValueError("c and nonneg must match the number of columns of A")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("problem data has non-finite entries")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "nonneg", nn)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """Solver verdict plus certificate.

    status        one of "optimal" / "infeasible" / "unbounded"
    z             primal solution (optimal only)
    objective     c.z at the optimum (optimal only)
    dual          length-m certificate: optimality multipliers, or the Farkas
                  vector for infeasible problems
    """

    status: str
    z: np.ndarray | None = None
    objective: float | None = None
    dual: np.ndarray | None = None


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    prow = T[row]
    prow /= prow[col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, prow)
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_simplex(T: np.ndarray, basis: np.ndarray, n_eligible: int,
                 allow_unbounded: bool, max_iter: int) -> str:
    """Run Bland-rule simplex on tableau T in place.

    The last row holds reduced costs (maximization: enter while any > tol),
    the last column the right-hand side.  Only the first ``n_eligible``
    columns may enter the basis.  Returns "optimal", "unbounded", or "stall".
    """
    m = T.shape[0] - 1
    obj = T[-1]
    for _ in range(max_iter):
        mask = obj[:n_eligible] > TOL_FEAS
        j = int(np.argmax(mask))  # Bland: smallest eligible index
        if not mask[j]:
            return OPTIMAL
        col = T[:m, j]
        pos = np.nonzero(col > TOL_FEAS)[0]
        if pos.size == 0:
            if allow_unbounded:
                return UNBOUNDED
            # phase 1 is always bounded; a flat column here is numerical noise
            obj[j] = 0.0
            continue
        ratios = T[pos, -1] / col[pos]
        np.maximum(ratios, 0.0, out=ratios)
        rmin = ratios.min()
        ties = pos[ratios <= rmin]
        row = int(ties[0]) if ties.size == 1 else int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, j)
    return "stall"


def solve(problem: LpProblem) -> LpOutcome:
    """Solve an equality-form LP; deterministic for identical input.

    A repeated numerical stall triggers one re-solve with the right-hand side
    perturbed by 1e-12; if that stalls too, ``LpError("ill-conditioned")``.
    """
    out = _solve_once(problem)
    if out is not None:
        return out
    m = problem.b.shape[0]
    bump = 1e-12 * (1.0 + np.arange(m, dtype=np.float64))
    perturbed = LpProblem(problem.A, problem.b + bump, problem.c, problem.nonneg)
    out = _solve_once(perturbed)
    if out is None:
        raise LpError("ill-conditioned")
    return out


def _solve_once(problem: LpProblem) -> LpOutcome | None:
    a, b, c, nonneg = problem.A, problem.b, problem.c, problem.nonneg
    m, nvar = a.shape

    # split free variables into positive/negative parts
    col_var = []   # original variable index per extended column
    col_sgn = []   # +1 for the positive part, -1 for the negative part
    for j in range(nvar):
        col_var.append(j)
        col_sgn.append(1.0)
        if not nonneg[j]:
            col_var.append(j)
            col_sgn.append(-1.0)
    col_var = np.asarray(col_var)
    col_sgn = np.asarray(col_sgn)
    a_ext = a[:, col_var] * col_sgn
    c_ext = c[col_var] * col_sgn
    n_ext = a_ext.shape[1]

    if m == 0:
        if np.any(c_ext > TOL_FEAS):
            return LpOutcome(UNBOUNDED)
        z = np.zeros(nvar)
        return LpOutcome(OPTIMAL, z=z, objective=0.0, dual=np.zeros(0))

    # flip rows so the right-hand side is nonnegative
    srow = np.where(b < 0.0, -1.0, 1.0)
    a_t = a_ext * srow[:, None]
    b_t = b * srow

    max_iter = 2000 + 40 * (m + n_ext)

    # phase 1: maximize -sum(artificials), starting basis = artificials
    T = np.zeros((m + 1, n_ext + m + 1))
    T[:m, :n_ext] = a_t
    T[:m, n_ext:n_ext + m] = np.eye(m)
    T[:m, -1] = b_t
    T[-1, :] = T[:m, :].sum(axis=0)   # reduced costs for cost (0,...,0,-1,...,-1)
    T[-1, n_ext:n_ext + m] = 0.0
    basis = np.arange(n_ext, n_ext + m)

    status = _run_simplex(T, basis, n_ext, allow_unbounded=False, max_iter=max_iter)
    if status == "stall":
        return None

    art_sum = float(T[-1, -1])  # equals sum of artificials at phase-1 optimum
    scale = max(1.0, float(np.abs(b_t).max(initial=0.0)))
    if art_sum > TOL_FEAS * scale:
        # Farkas certificate from the phase-1 multipliers
        binv = T[:m, n_ext:n_ext + m]
        cb = np.where(basis >= n_ext, -1.0, 0.0)
        y = cb @ binv
        farkas = -(srow * y)
        return LpOutcome(INFEASIBLE, dual=farkas)

    # drive leftover artificials out of the basis (or drop redundant rows)
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n_ext:
            structural = np.nonzero(np.abs(T[i, :n_ext]) > TOL_FEAS)[0]
            if structural.size:
                _pivot(T, basis, i, int(structural[0]))
            else:
                keep[i] = False  # redundant constraint
    if not keep.all():
        rows = np.r_[np.nonzero(keep)[0], m]
        T = T[rows]
        basis = basis[keep]
        m_red = basis.shape[0]
    else:
        m_red = m

    # phase 2 objective
    T[-1, :] = 0.0
    T[-1, :n_ext] = c_ext
    cb2 = c_ext[basis]
    nzb = np.nonzero(np.abs(cb2) > 0.0)[0]
    for i in nzb:
        T[-1, :] -= cb2[i] * T[i, :]

    status = _run_simplex(T, basis, n_ext, allow_unbounded=True, max_iter=max_iter)
    if status == "stall":
        return None
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)

    z_ext = np.zeros(n_ext)
    z_ext[basis] = np.maximum(T[:m_red, -1], 0.0)
    z = np.zeros(nvar)
    np.add.at(z, col_var, col_sgn * z_ext)

    # dual from the artificial block (tracks the accumulated row operations,
    # so it stays a valid multiplier set for the original m rows even after
    # redundant rows were dropped), mapped back through the row flips
    binv = T[:m_red, n_ext:n_ext + m]
    y = c_ext[basis] @ binv
    dual = srow * y

    objective = float(c @ z)
    return LpOutcome(OPTIMAL, z=z, objective=objective, dual=dual)


def feasible(problem_a: np.ndarray, problem_b: np.ndarray, nonneg: np.ndarray) -> LpOutcome:
    """Feasibility query (zero objective) for A z = b with a sign mask."""
    nvar = problem_a.shape[1]
    return solve(LpProblem(problem_a, problem_b, np.zeros(nvar), nonneg))
