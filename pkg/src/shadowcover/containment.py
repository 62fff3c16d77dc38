"""Translate-fit and scale-fit queries, plus finite vertex-subset witnesses.

The central query: the largest t such that t*K + v fits inside L for some
translation v, found by one LP over convex-combination variables.  K fits in
L by translation iff that maximum is at least 1 (up to the geometric
tolerance band).

Subset witnesses make the containment equivalences decidable for polytopes:
the intersection of L - x over all x in K equals the intersection over the
canonical vertices of K alone (convexity), so Helly's theorem applies to a
finite family and checking all (k)-subsets of vertices is a complete test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import lp
from .bodies import (
    Polytope,
    canonical_vertex_indices,
    canonicalize,
    origin_interior_coefficients,
    point_in_hull,
    simplex_from_supports,
    support,
)
from .core import TOL_GEOM

STATUS_OK = "ok"
STATUS_DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a scale-fit query.

    sigma         maximal homothety factor t with t*K + v inside L
                  (math.inf when unconstrained, see status)
    translation   witness v at the optimum (None when degenerate)
    status        "ok", or "degenerate" when t is unbounded, which happens
                  exactly when K is a single point
    """

    sigma: float
    translation: np.ndarray | None
    status: str = STATUS_OK

    @property
    def degenerate(self) -> bool:
        return self.status == STATUS_DEGENERATE


def _scale_fit_lp(kv: np.ndarray, lv: np.ndarray, fixed_t: float | None = None):
    """Build the scale-fit LP over variables (t, v, lambda).

    Constraints: t*x_i + v = sum_j lambda_ij y_j and sum_j lambda_ij = 1 for
    each vertex x_i of K, lambda >= 0, v free, t >= 0.  With ``fixed_t`` the
    t column is dropped and the products move to the right-hand side.
    """
    mk, n = kv.shape
    ml = lv.shape[0]
    has_t = fixed_t is None
    ncols = (1 if has_t else 0) + n + mk * ml
    nrows = mk * (n + 1)
    a = np.zeros((nrows, ncols))
    b = np.zeros(nrows)
    off = 1 if has_t else 0
    for i in range(mk):
        r0 = i * (n + 1)
        if has_t:
            a[r0:r0 + n, 0] = kv[i]
        else:
            b[r0:r0 + n] = -fixed_t * kv[i]
        a[r0:r0 + n, off:off + n] = np.eye(n)
        lam0 = off + n + i * ml
        a[r0:r0 + n, lam0:lam0 + ml] = -lv.T
        a[r0 + n, lam0:lam0 + ml] = 1.0
        b[r0 + n] = 1.0
    c = np.zeros(ncols)
    if has_t:
        c[0] = 1.0
    nonneg = np.ones(ncols, dtype=bool)
    nonneg[off:off + n] = False
    return lp.LpProblem(a, b, c, nonneg)


def _affine_basis_rows(points: np.ndarray) -> list[int] | None:
    """Indices of n+1 affinely independent rows, greedily; None if flat."""
    m, n = points.shape
    chosen = [0]
    for i in range(1, m):
        if len(chosen) == n + 1:
            break
        cand = points[chosen[1:] + [i]] - points[chosen[0]]
        sv = np.linalg.svd(cand, compute_uv=False)
        if sv[-1] > 1e-9 * max(1.0, sv[0]):
            chosen.append(i)
    return chosen if len(chosen) == n + 1 else None


def _warm_scale_fit(kv: np.ndarray, lv: np.ndarray):
    """Phase-2-only simplex for the scale-fit LP from an explicit basis.

    Translating L so that a chosen vertex simplex has its centroid at the
    origin makes the uniform barycentric weights a feasible basis (all
    convexity rows satisfied with t = 0, v = 0), so the artificial phase is
    unnecessary.  Returns (sigma, v) on success, "unbounded", or None when
    the structure does not apply (degenerate L) and the caller should use
    the general solver.
    """
    mk, n = kv.shape
    ml = lv.shape[0]
    idx = _affine_basis_rows(lv)
    if idx is None:
        return None
    shift = lv[idx].mean(axis=0)
    lv2 = lv - shift
    bmat = np.vstack([-lv2[idx].T, np.ones(n + 1)])  # one block, shared by all i
    if np.linalg.cond(bmat) > 1e10:
        return None
    binv = np.linalg.inv(bmat)
    # columns: t | v+ (n) | v- (n) | lambda (mk*ml); rows: mk blocks of n+1
    ncols = 1 + 2 * n + mk * ml
    nrows = mk * (n + 1)
    T = np.zeros((nrows + 1, ncols + 1))
    basis = np.empty(nrows, dtype=np.int64)
    block_b = np.zeros(n + 1)
    block_b[n] = 1.0
    rhs_block = binv @ block_b
    lam_block = binv @ np.vstack([-lv2.T, np.ones(ml)])
    vmat = binv[:, :n]
    for i in range(mk):
        r0 = i * (n + 1)
        rows = slice(r0, r0 + n + 1)
        T[rows, 0] = binv @ np.concatenate([kv[i], [0.0]])
        T[rows, 1:1 + n] = vmat
        T[rows, 1 + n:1 + 2 * n] = -vmat
        lam0 = 1 + 2 * n + i * ml
        T[rows, lam0:lam0 + ml] = lam_block
        T[rows, -1] = rhs_block
        for r in range(n + 1):
            basis[r0 + r] = lam0 + idx[r]
    T[-1, 0] = 1.0  # reduced costs: c_B = 0, so the cost row is just c
    status = lp._run_simplex(T, basis, ncols, allow_unbounded=True,
                             max_iter=2000 + 40 * (nrows + ncols))
    if status == lp.UNBOUNDED:
        return "unbounded"
    if status != lp.OPTIMAL:
        return None
    z = np.zeros(ncols)
    z[basis] = np.maximum(T[:nrows, -1], 0.0)
    sigma = float(z[0])
    v = z[1:1 + n] - z[1 + n:1 + 2 * n] + shift
    return sigma, v


def scale_fit(k: Polytope, l: Polytope) -> FitResult:
    """Maximal t with t*K + v inside L, and the witness translation.

    K fits in L by translation iff sigma >= 1 - TOL_GEOM.  An unbounded LP
    (K is a single point) is reported as degenerate with sigma = inf rather
    than guessed at.
    """
    if k.dim != l.dim:
        raise ValueError(f"dimension mismatch: K in R^{k.dim}, L in R^{l.dim}")
    n = k.dim
    warm = _warm_scale_fit(k.vertices, l.vertices)
    if warm == "unbounded":
        return FitResult(math.inf, None, STATUS_DEGENERATE)
    if warm is not None:
        sigma, v = warm
        return FitResult(sigma, v, STATUS_OK)
    out = lp.solve(_scale_fit_lp(k.vertices, l.vertices))
    if out.status == lp.UNBOUNDED:
        return FitResult(math.inf, None, STATUS_DEGENERATE)
    if out.status != lp.OPTIMAL:
        raise lp.LpError("scale-fit LP unexpectedly infeasible")
    return FitResult(float(out.objective), out.z[1:1 + n].copy(), STATUS_OK)


def fit_translation(k: Polytope, l: Polytope, t: float = 1.0) -> np.ndarray | None:
    """Translation v with t*K + v inside L, or None if none exists."""
    n = k.dim
    out = lp.solve(_scale_fit_lp(k.vertices, l.vertices, fixed_t=t))
    if out.status != lp.OPTIMAL:
        return None
    return out.z[:n].copy()


def translate_fits(k: Polytope, l: Polytope,
                   tol_geom: float = TOL_GEOM) -> tuple[bool, np.ndarray | None]:
    """Does L contain a translate of K?  Verdict at the sigma >= 1 - tol band.

    The witness comes from re-solving with t fixed at 1; if that re-solve is
    infeasible inside the tolerance band, the optimal-scale translation is
    returned instead.  A degenerate (single-point) K fits any nonempty L.
    """
    fit = scale_fit(k, l)
    if fit.degenerate:
        return True, l.vertices[0] - k.vertices[0]
    if fit.sigma < 1.0 - tol_geom:
        return False, None
    v = fit_translation(k, l, 1.0)
    if v is None:
        v = fit.translation
    return True, v


def replay_fit(k: Polytope, l: Polytope, fit: FitResult) -> bool:
    """Certificate replay: every sigma*x_i + v must lie in L (point-in-hull LP)."""
    if fit.degenerate:
        return point_in_hull(l.vertices[0], l)
    return all(point_in_hull(fit.sigma * x + fit.translation, l) for x in k.vertices)


def subset_witness(k: Polytope, l: Polytope, kcount: int,
                   tol_geom: float = TOL_GEOM) -> list[int] | None:
    """Some kcount-subset of K's canonical vertices whose hull does not
    translate into L, or None when every subset fits.

    Indices refer to ``k.vertices``.  Search is lexicographic over
    combinations with early exit, so results are deterministic.
    """
    if kcount < 1:
        raise ValueError("subset size must be at least 1")
    idx = list(range(k.nverts)) if k.canonical else canonical_vertex_indices(k)
    kcount = min(kcount, len(idx))
    v = k.vertices
    for combo in combinations(idx, kcount):
        sub = Polytope(v[list(combo)])
        fit = scale_fit(sub, l)
        if not fit.degenerate and fit.sigma < 1.0 - tol_geom:
            return list(combo)
    return None


def min_subset_sigma(k: Polytope, l: Polytope, kcount: int) -> float:
    """Minimum of scale_fit over all kcount-subsets of canonical vertices.

    The margin |min - 1| quantifies how decisively the subset condition
    holds or fails; used by the randomized harnesses.
    """
    idx = list(range(k.nverts)) if k.canonical else canonical_vertex_indices(k)
    kcount = min(kcount, len(idx))
    v = k.vertices
    best = math.inf
    for combo in combinations(idx, kcount):
        fit = scale_fit(Polytope(v[list(combo)]), l)
        if not fit.degenerate:
            best = min(best, fit.sigma)
    return best


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Both routes of the inscribed-polytope containment equivalence."""

    sigma: float
    fits: bool
    witness: list[int] | None
    subset_empty: bool
    agrees: bool
    borderline: bool
    theorem_backed: bool

    @property
    def hard_failure(self) -> bool:
        return self.theorem_backed and not self.agrees and not self.borderline


def inscribed_equivalence_check(k: Polytope, l: Polytope, kcount: int,
                                context_dim: int,
                                tol_geom: float = TOL_GEOM) -> EquivalenceReport:
    """Compare subset-witness emptiness against the direct translate verdict.

    For kcount = context_dim + 1 the two verdicts must agree; a disagreement
    outside the band |sigma - 1| <= 10 * tol_geom is a hard failure.
    Borderline instances are tagged and excluded from pass/fail statistics.
    """
    kc = canonicalize(k)
    fit = scale_fit(kc, l)
    fits = fit.degenerate or fit.sigma >= 1.0 - tol_geom
    witness = subset_witness(kc, l, kcount, tol_geom=tol_geom)
    sigma = fit.sigma
    borderline = (not fit.degenerate) and abs(sigma - 1.0) <= 10.0 * tol_geom
    return EquivalenceReport(
        sigma=sigma,
        fits=fits,
        witness=witness,
        subset_empty=witness is None,
        agrees=(witness is None) == fits,
        borderline=borderline,
        theorem_backed=(kcount == context_dim + 1),
    )


def circumscribing_simplex_witness(k: Polytope, l: Polytope, restarts: int,
                                   rng: np.random.Generator,
                                   tol_geom: float = TOL_GEOM) -> Polytope | None:
    """Heuristic search for a simplex containing L that K does not fit into.

    When K does not translate into L, such a circumscribing simplex exists
    but is non-constructive; this samples n+1 directions whose hull interior
    contains the origin, builds the simplex supporting L in those directions,
    and tests the fit.  Absence of a result is NOT a disproof.
    """
    fits, _ = translate_fits(k, l, tol_geom=tol_geom)
    if fits:
        raise ValueError("K translates into L; no circumscribing-simplex witness exists")
    n = k.dim
    for _ in range(restarts):
        dirs = rng.standard_normal((n + 1, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        if origin_interior_coefficients(dirs, tol_geom=tol_geom) is None:
            continue
        heights = np.array([support(l, u) for u in dirs])
        try:
            simplex = simplex_from_supports(dirs, heights)
        except ValueError:
            continue
        fit = scale_fit(k, simplex)
        if not fit.degenerate and fit.sigma < 1.0 - tol_geom:
            return simplex
    return None
