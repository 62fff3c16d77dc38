"""Shadow-covering verdicts over directions and d-subspaces.

The universal quantifier "for every d-dimensional subspace" is approximated
by deterministic direction grids (hyperplane shadows in R^2/R^3), Haar
samples elsewhere, and local refinement around the worst samples.  Verdicts
are labeled with their sample counts; the only complete finite procedures
are the vertex-subset witnesses and the simplex edge criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bodies import (
    Polytope,
    affine_dim,
    canonicalize,
    linear_image,
    project,
    support,
    translate,
)
from .containment import FitResult, fit_translation, scale_fit
from .core import (
    TOL_FEAS,
    TOL_GEOM,
    Subspace,
    direction_grid,
    haar_subspace,
    hyperplane_basis,
    orthonormalize,
    unit,
)

COVERS = "covers"
FAILS = "fails"
BORDERLINE = "borderline"


@dataclass(frozen=True, eq=False)
class ShadowReport:
    """Sampled approximation of the all-subspaces covering quantifier."""

    d: int
    samples: int
    min_sigma: float
    argmin: Subspace | None
    verdict: str
    borderline_count: int
    sigmas: np.ndarray
    bases: list[np.ndarray]


def shadow_fit(k: Polytope, l: Polytope, s: Subspace) -> FitResult:
    """Scale fit of the two shadows on a common subspace."""
    if k.dim != l.dim:
        raise ValueError("bodies must share an ambient dimension")
    return scale_fit(project(k, s), project(l, s))


def sweep_subspaces(n: int, d: int, count: int, sampler: str = "auto",
                    rng: np.random.Generator | None = None) -> list[Subspace]:
    """Subspace sample for a sweep: deterministic grids for hyperplane
    shadows in R^2/R^3, Haar samples otherwise."""
    grid_ok = (d == n - 1 and n in (2, 3)) or (d == 1 and n in (2, 3))
    if sampler == "auto":
        sampler = "grid" if d == n - 1 and n in (2, 3) else "haar"
    if sampler == "grid":
        if not grid_ok:
            raise ValueError("grid sampler only supports d=1 or d=n-1 in R^2/R^3")
        dirs = direction_grid(n, count)
        if d == n - 1:
            return [Subspace(hyperplane_basis(u)) for u in dirs]
        return [Subspace(u[:, None]) for u in dirs]
    if sampler != "haar":
        raise ValueError(f"unknown sampler {sampler!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    return [haar_subspace(n, d, rng) for _ in range(count)]


def shadow_sweep(k: Polytope, l: Polytope, d: int, sampler: str = "auto",
                 count: int = 1000, rng: np.random.Generator | None = None,
                 tol_geom: float = TOL_GEOM) -> ShadowReport:
    """Evaluate shadow_fit over sampled subspaces.

    Verdict: "fails" iff some sample has sigma < 1 - tol_geom, otherwise
    "covers".  Samples inside the band |sigma - 1| <= tol_geom are counted
    as borderline.  Degenerate samples (point shadows) count as covering.
    """
    n = k.dim
    if not (1 <= d < n):
        raise ValueError(f"need 1 <= d < {n}, got {d}")
    subs = sweep_subspaces(n, d, count, sampler=sampler, rng=rng)
    sigmas = np.empty(len(subs))
    for i, s in enumerate(subs):
        fit = shadow_fit(k, l, s)
        sigmas[i] = math.inf if fit.degenerate else fit.sigma
    finite = sigmas[np.isfinite(sigmas)]
    min_sigma = float(finite.min()) if finite.size else math.inf
    arg = int(np.argmin(np.where(np.isfinite(sigmas), sigmas, np.inf))) if finite.size else 0
    verdict = FAILS if min_sigma < 1.0 - tol_geom else COVERS
    borderline_count = int(np.sum(np.abs(finite - 1.0) <= tol_geom))
    return ShadowReport(
        d=d,
        samples=len(subs),
        min_sigma=min_sigma,
        argmin=subs[arg] if subs else None,
        verdict=verdict,
        borderline_count=borderline_count,
        sigmas=sigmas,
        bases=[s.basis for s in subs],
    )


def refine_min_margin(k: Polytope, l: Polytope, d: int, start: Subspace,
                      steps: int = 50,
                      rng: np.random.Generator | None = None) -> tuple[Subspace, float]:
    """Local descent of sigma over the Grassmannian from a starting subspace.

    Random basis perturbations with accept-on-decrease and step halving on
    rejection; the returned sigma never exceeds the starting one.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n = k.dim
    current = start
    fit = shadow_fit(k, l, current)
    sigma = math.inf if fit.degenerate else fit.sigma
    step = 0.25
    for _ in range(steps):
        cand_basis = current.basis + step * rng.standard_normal((n, d))
        try:
            cand = orthonormalize(cand_basis)
        except ValueError:
            step = max(step * 0.5, 1e-7)
            continue
        f = shadow_fit(k, l, cand)
        s = math.inf if f.degenerate else f.sigma
        if s < sigma:
            current, sigma = cand, s
        else:
            step = max(step * 0.5, 1e-7)
    return current, sigma


def simplex_edge_directions(t: Polytope) -> np.ndarray:
    """Unit vertex-difference directions of a simplex, deduplicated up to sign."""
    v = t.vertices
    dirs = []
    for i, j in combinations(range(v.shape[0]), 2):
        e = unit(v[i] - v[j])
        lead = np.nonzero(np.abs(e) > 1e-12)[0][0]
        if e[lead] < 0:
            e = -e
        if not any(np.allclose(e, d, atol=1e-12) for d in dirs):
            dirs.append(e)
    return np.array(dirs)


def simplex_edge_criterion(q: Polytope, t: Polytope,
                           tol_geom: float = TOL_GEOM) -> bool:
    """Complete finite test: Q translates into the simplex T iff every
    hyperplane shadow along an edge direction of T covers Q's shadow.

    Valid when T is an n-simplex and Q has at most n canonical vertices; at
    the maximal inscription some vertex of the scaled Q must sit on a ridge
    of T, which the shadow along the complementary edge detects exactly.
    """
    n = t.dim
    tc = canonicalize(t)
    if tc.nverts != n + 1 or affine_dim(tc) != n:
        raise ValueError(f"T must be a full-dimensional simplex with {n + 1} vertices")
    qc = canonicalize(q)
    if qc.nverts > n:
        raise ValueError(f"Q may have at most {n} vertices, got {qc.nverts}")
    for e in simplex_edge_directions(tc):
        basis = Subspace(hyperplane_basis(e))
        fit = shadow_fit(qc, tc, basis)
        if not fit.degenerate and fit.sigma < 1.0 - tol_geom:
            return False
    return True


@dataclass(frozen=True, eq=False)
class ObliqueReport:
    """Per-direction covering verdicts before and after a nonsingular map."""

    sigma_orig: float
    sigma_mapped: float
    verdict_orig: bool
    verdict_mapped: bool
    agrees: bool
    borderline: bool
    mapped_direction: np.ndarray


def oblique_equivalence_check(k: Polytope, l: Polytope, m, u,
                              tol_geom: float = TOL_GEOM) -> ObliqueReport:
    """Compare hyperplane-shadow covering along u with covering along the
    mapped direction for the transformed bodies.

    A nonsingular map psi sends the line family parallel to u onto the
    family parallel to psi(u), so verdict (and scale) are preserved; the
    check evaluates both sides directly.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (k.dim, k.dim):
        raise ValueError("transformation must be square in the ambient dimension")
    if abs(np.linalg.det(m)) <= TOL_FEAS:
        raise ValueError("singular transformation")
    u = unit(u)
    u_tilde = unit(m @ u)
    s1 = Subspace(hyperplane_basis(u))
    s2 = Subspace(hyperplane_basis(u_tilde))
    f1 = shadow_fit(k, l, s1)
    f2 = shadow_fit(linear_image(k, m), linear_image(l, m), s2)
    sig1 = math.inf if f1.degenerate else f1.sigma
    sig2 = math.inf if f2.degenerate else f2.sigma
    v1 = sig1 >= 1.0 - tol_geom
    v2 = sig2 >= 1.0 - tol_geom
    borderline = (math.isfinite(sig1) and abs(sig1 - 1.0) <= 10.0 * tol_geom) or \
                 (math.isfinite(sig2) and abs(sig2 - 1.0) <= 10.0 * tol_geom)
    return ObliqueReport(sig1, sig2, v1, v2, v1 == v2, borderline, u_tilde)


@dataclass(frozen=True, eq=False)
class FlatLiftReport:
    """Ambient shadow covering for coplanar bodies, lifted from their flat."""

    applicable: bool
    holds: bool | None
    sigma_inflat: float
    sigma_ambient: float
    support_dominates: bool | None
    translation: np.ndarray | None


def _common_flat(k: Polytope, l: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Anchor point and orthonormal direction basis of the smallest flat
    containing both bodies; error when no common flat exists below ambient."""
    pts = np.vstack([k.vertices, l.vertices])
    p0 = pts.mean(axis=0)
    diffs = pts - p0
    u_, sv, vt = np.linalg.svd(diffs, full_matrices=False)
    scale_ref = max(1.0, float(sv[0]) if sv.size else 1.0)
    rank = int(np.sum(sv > 1e3 * TOL_FEAS * scale_ref))
    basis = vt[:rank].T
    resid = diffs - (diffs @ basis) @ basis.T
    if np.max(np.abs(resid)) > 1e-7 * scale_ref:
        raise ValueError("bodies do not lie in a common flat")
    return p0, basis


def flat_lift_check(k: Polytope, l: Polytope, eta: Subspace,
                    tol_geom: float = TOL_GEOM) -> FlatLiftReport:
    """Verify that in-flat shadow covering lifts to an ambient subspace eta.

    Projects eta into the bodies' common flat, finds the in-flat translation
    aligning the shadows there, then checks both the ambient shadow fit and
    the pointwise support-function domination that the lift argument rests
    on.  Raises when K and L do not share a proper flat.
    """
    p0, vbasis = _common_flat(k, l)
    n, flat_dim = vbasis.shape
    if flat_dim >= n:
        raise ValueError("bodies span the ambient space; nothing to lift")
    if eta.n != n:
        raise ValueError("eta must live in the ambient space")
    k_flat = Polytope((k.vertices - p0) @ vbasis)
    l_flat = Polytope((l.vertices - p0) @ vbasis)

    # project eta into the flat (as a set of directions)
    proj = vbasis @ (vbasis.T @ eta.basis)
    sv = np.linalg.svd(proj, compute_uv=False)
    eta_hat_dim = int(np.sum(sv > 1e3 * TOL_FEAS * max(1.0, sv[0] if sv.size else 1.0)))

    ambient_fit = shadow_fit(k, l, eta)
    sigma_ambient = math.inf if ambient_fit.degenerate else ambient_fit.sigma

    if eta_hat_dim == 0:
        # eta orthogonal to the flat: both shadows are single points
        return FlatLiftReport(True, sigma_ambient >= 1.0 - tol_geom, math.inf,
                              sigma_ambient, True, np.zeros(n))

    u_p, _, _ = np.linalg.svd(proj, full_matrices=False)
    eta_hat_basis = u_p[:, :eta_hat_dim]  # ambient orthonormal basis inside the flat
    eta_hat_flat = Subspace(vbasis.T @ eta_hat_basis)

    k_shadow = project(k_flat, eta_hat_flat)
    l_shadow = project(l_flat, eta_hat_flat)
    inflat_fit = scale_fit(k_shadow, l_shadow)
    sigma_inflat = math.inf if inflat_fit.degenerate else inflat_fit.sigma
    applicable = sigma_inflat >= 1.0 - tol_geom
    if not applicable:
        return FlatLiftReport(False, None, sigma_inflat, sigma_ambient, None, None)

    # in-flat normalization translate: K_eta_hat + v inside L_eta_hat
    if inflat_fit.degenerate:
        v = l_shadow.vertices[0] - k_shadow.vertices[0]
    else:
        v = fit_translation(k_shadow, l_shadow, 1.0)
        if v is None:
            v = inflat_fit.translation
    w = eta_hat_basis @ v  # lift back to an ambient vector inside the flat

    # support domination along eta for the normalized bodies
    k_moved = translate(k, w)
    dirs = _subspace_directions(eta)
    scale_ref = max(1.0, np.abs(l.vertices).max())
    support_ok = all(
        support(k_moved, g) <= support(l, g) + 10.0 * tol_geom * scale_ref
        for g in dirs
    )
    holds = sigma_ambient >= 1.0 - tol_geom
    return FlatLiftReport(True, holds, sigma_inflat, sigma_ambient, support_ok, w)


def _subspace_directions(s: Subspace, count: int = 64) -> np.ndarray:
    """Deterministic unit directions spanning a subspace."""
    if s.d == 1:
        b = s.basis[:, 0]
        return np.array([b, -b])
    if s.d in (2, 3):
        return direction_grid(s.d, count) @ s.basis.T
    rng = np.random.default_rng(0)
    g = rng.standard_normal((count, s.d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g @ s.basis.T
