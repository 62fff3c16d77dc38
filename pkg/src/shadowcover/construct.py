"""Certified counterexamples: bodies whose shadows can be covered while the
body itself cannot.

Pipeline: pick regular unit normals at distinct exposed points whose convex
hull has the origin interior, materialize the circumscribing simplex those
normals support, verify that the body touches every facet away from all
ridges, then bound the direction-independent inflation factor by a sampled
sweep with local refinement.  The inflated body fits through every sampled
shadow of the simplex but cannot fit inside it, since the simplex is already
maximally tight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .bodies import (
    Polytope,
    affine_dim,
    body_to_dict,
    canonicalize,
    origin_interior_coefficients,
    scale,
    simplex_facet_normals,
    simplex_from_supports,
    support,
    support_set,
)
from .containment import _scale_fit_lp, scale_fit, translate_fits
from .core import TOL_FEAS, TOL_GEOM, Subspace, direction_grid, haar_subspace, hyperplane_basis
from .shadows import (
    COVERS,
    flat_lift_check,
    refine_min_margin,
    shadow_fit,
    shadow_sweep,
    sweep_subspaces,
)

# sampled inflation factors this thin are treated as construction failures
# rather than emitted as certificates
EPSILON_FLOOR = 1e-4


class ConstructionError(RuntimeError):
    """Restart budget exhausted or a hypothesis cannot be met."""


@dataclass(frozen=True, eq=False)
class NormalSelection:
    """n+1 regular unit normals at distinct exposed points of a body.

    coefficients are positive with sum a_i u_i = 0, certifying that the
    origin is interior to the hull of the normals, so the normals bound a
    genuine simplex.
    """

    normals: np.ndarray
    touch_indices: np.ndarray
    coefficients: np.ndarray

    def residual(self) -> float:
        return float(np.linalg.norm(self.coefficients @ self.normals))

    def validate(self, k: Polytope, tol_geom: float = TOL_GEOM) -> bool:
        if self.residual() > TOL_FEAS:
            return False
        if np.min(self.coefficients) <= TOL_FEAS:
            return False
        touches = [int(t) for t in self.touch_indices]
        if len(set(touches)) != len(touches):
            return False
        for u, t in zip(self.normals, touches):
            if support_set(k, u, tol_geom=tol_geom) != [t]:
                return False
        return True


def _selection_pass(k: Polytope, rng: np.random.Generator, tol_geom: float,
                    stats: dict) -> NormalSelection | None:
    n = k.dim
    chosen: list[np.ndarray] = []
    touched: list[int] = []
    budget = 80 * n
    while len(chosen) < n and budget > 0:
        budget -= 1
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        ss = support_set(k, u, tol_geom=tol_geom)
        if len(ss) != 1:
            stats["irregular"] += 1
            continue
        if ss[0] in touched:
            stats["reused_vertex"] += 1
            continue
        if chosen:
            sv = np.linalg.svd(np.vstack(chosen + [u]), compute_uv=False)
            if sv[-1] <= 1e-6:
                stats["dependent"] += 1
                continue
        chosen.append(u)
        touched.append(ss[0])
    if len(chosen) < n:
        return None
    base = np.vstack(chosen)
    # closing direction from the negative cone of the chosen normals, as the
    # spherical polar-dual argument prescribes
    for _ in range(60):
        a = rng.uniform(0.2, 1.0, n)
        u = -(a @ base)
        norm = np.linalg.norm(u)
        if norm <= 1e-12:
            continue
        u /= norm
        if np.max(base @ u) >= 0.0:
            stats["closing_rejected"] += 1
            continue
        ss = support_set(k, u, tol_geom=tol_geom)
        if len(ss) != 1 or ss[0] in touched:
            stats["irregular"] += 1
            continue
        dirs = np.vstack([base, u])
        coeffs = origin_interior_coefficients(dirs, tol_geom=tol_geom)
        if coeffs is None:
            stats["lp_rejected"] += 1
            continue
        return NormalSelection(dirs, np.array(touched + [ss[0]]), coeffs)
    return None


def _select_normals(k: Polytope, rng: np.random.Generator, restarts: int,
                    tol_geom: float, require_full_dim: bool) -> NormalSelection:
    n = k.dim
    if k.nverts < n + 1:
        raise ConstructionError(
            f"normal selection needs at least {n + 1} canonical vertices, got {k.nverts}")
    if require_full_dim and affine_dim(k) != n:
        raise ConstructionError("normal selection needs a full-dimensional body")
    stats = {"restarts": 0, "irregular": 0, "reused_vertex": 0,
             "dependent": 0, "closing_rejected": 0, "lp_rejected": 0}
    for _ in range(max(1, restarts)):
        stats["restarts"] += 1
        sel = _selection_pass(k, rng, tol_geom, stats)
        if sel is not None:
            return sel
    raise ConstructionError(f"selection failed after {restarts} restarts: {stats}")


def select_regular_normals(k: Polytope, rng: np.random.Generator,
                           restarts: int = 50,
                           tol_geom: float = TOL_GEOM) -> NormalSelection:
    """Rejection-sample n+1 regular unit normals at distinct exposed points
    with the origin interior to their convex hull.

    Regular directions of a polytope have full measure, so sampling
    terminates quickly; the interior-origin LP certifies the set.  Exhausting
    the restart budget raises with the rejection statistics, never a silent
    fallback.  Requires a full-dimensional canonical body with at least n+1
    vertices.
    """
    kc = canonicalize(k)
    return _select_normals(kc, rng, restarts, tol_geom, require_full_dim=True)


def circumscribe_simplex(k: Polytope, sel: NormalSelection) -> Polytope:
    """The simplex {x : x.u_i <= h_K(u_i)} in vertex representation.

    Vertex j solves the n x n system formed by the other n supporting
    hyperplanes; ill-conditioned systems raise so the caller can reselect.
    """
    heights = np.array([support(k, u) for u in sel.normals])
    return simplex_from_supports(sel.normals, heights)


def verify_touching(k: Polytope, s: Polytope, tol_geom: float = TOL_GEOM) -> bool:
    """Does K touch every facet of the simplex S at a single vertex in the
    facet's relative interior, away from every ridge?

    This is the hypothesis that keeps the inflation gap bounded away from 1:
    the touch margin demands each touching vertex stays at least tol_geom
    inside all other facets.
    """
    normals, heights = simplex_facet_normals(s)
    vals = k.vertices @ normals.T  # (mk, n+1)
    if np.any(vals > heights[None, :] + 1e2 * TOL_FEAS):
        return False  # K is not inside S at all
    for i in range(normals.shape[0]):
        touching = np.nonzero(vals[:, i] >= heights[i] - tol_geom)[0]
        if touching.shape[0] != 1:
            return False
        x = touching[0]
        others = [j for j in range(normals.shape[0]) if j != i]
        if np.any(vals[x, others] > heights[others] - tol_geom):
            return False
    return True


def direction_sigmas(k: Polytope, s: Polytope, directions: np.ndarray) -> np.ndarray:
    """Hyperplane-shadow scale fit of (K, S) per direction."""
    sigmas = np.empty(len(directions))
    for i, u in enumerate(directions):
        fit = shadow_fit(k, s, Subspace(hyperplane_basis(u)))
        sigmas[i] = math.inf if fit.degenerate else fit.sigma
    return sigmas


def epsilon_gap(k: Polytope, s: Polytope, directions: np.ndarray,
                rng: np.random.Generator | None = None,
                refine_steps: int = 40,
                tol_geom: float = TOL_GEOM) -> float:
    """Sampled inflation gap: min over directions of the shadow scale fit,
    sharpened by local refinement from the five smallest samples.

    The touching hypothesis guarantees the true infimum exceeds 1; the
    returned value is a sampled minimum, never claimed as the infimum.
    """
    if not verify_touching(k, s, tol_geom=tol_geom):
        raise ValueError("epsilon gap requires the touching hypothesis; verify_touching failed")
    directions = np.asarray(directions, dtype=np.float64)
    sigmas = direction_sigmas(k, s, directions)
    return _refine_epsilon(k, s, directions, sigmas, rng, refine_steps)


def _refine_epsilon(k: Polytope, s: Polytope, directions: np.ndarray,
                    sigmas: np.ndarray, rng: np.random.Generator | None,
                    refine_steps: int) -> float:
    eps = float(np.min(sigmas))
    if rng is None:
        rng = np.random.default_rng(0)
    n = k.dim
    for idx in np.argsort(sigmas)[:5]:
        start = Subspace(hyperplane_basis(directions[idx]))
        _, refined = refine_min_margin(k, s, n - 1, start, steps=refine_steps, rng=rng)
        eps = min(eps, refined)
    return eps


@dataclass(frozen=True, eq=False)
class Counterexample:
    """A certified pair: shadows of epsilon * body fit in the cover's
    shadows, while the cover cannot contain epsilon * body."""

    body: Polytope
    cover: Polytope
    epsilon: float
    d: int
    sample_log: dict
    certificate: NormalSelection
    checks: dict
    seed: int | None = None

    def to_dict(self) -> dict:
        vectors = np.asarray(self.sample_log["vectors"])
        return {
            "body": body_to_dict(self.body),
            "cover": body_to_dict(self.cover),
            "epsilon": float(self.epsilon),
            "d": self.d,
            "seed": self.seed,
            "sample_count": int(len(self.sample_log["sigmas"])),
            "sample_log": {
                "kind": self.sample_log["kind"],
                "vector_shape": list(vectors.shape),
                "vectors": vectors.reshape(vectors.shape[0], -1).tolist(),
                "sigmas": [float(x) for x in self.sample_log["sigmas"]],
            },
            "certificate": {
                "normals": self.certificate.normals.tolist(),
                "touch_indices": [int(t) for t in self.certificate.touch_indices],
                "coefficients": [float(a) for a in self.certificate.coefficients],
            },
            "checks": {key: bool(val) for key, val in self.checks.items()},
        }


def farkas_excludes_translate(body: Polytope, cover: Polytope,
                              factor: float) -> bool:
    """Is there a verified Farkas certificate that factor * body cannot be
    translated into cover?"""
    prob = _scale_fit_lp(scale(body, factor).vertices, cover.vertices, fixed_t=1.0)
    out = lp.solve(prob)
    if out.status != lp.INFEASIBLE or out.dual is None:
        return False
    y = out.dual
    if float(y @ prob.b) <= TOL_FEAS:
        return False
    prod = y @ prob.A
    if np.max(prod[prob.nonneg], initial=0.0) > 1e-6:
        return False
    if np.max(np.abs(prod[~prob.nonneg]), initial=0.0) > 1e-6:
        return False
    return True


def replay_counterexample(ce: Counterexample, sweep_count: int = 1000,
                          tol_geom: float = TOL_GEOM) -> dict:
    """Re-run every invariant of an emitted counterexample from scratch."""
    fit = scale_fit(ce.body, ce.cover)
    fits, _ = translate_fits(scale(ce.body, ce.epsilon), ce.cover, tol_geom=tol_geom)
    sweep = shadow_sweep(scale(ce.body, ce.epsilon), ce.cover, ce.d,
                         count=sweep_count, tol_geom=tol_geom)
    log_min = float(np.min(ce.sample_log["sigmas"]))
    return {
        "circumscribes": abs(fit.sigma - 1.0) <= 10.0 * tol_geom,
        "epsilon_gt_one": ce.epsilon > 1.0 + tol_geom,
        "translate_excluded": not fits,
        "farkas_backed": farkas_excludes_translate(ce.body, ce.cover, ce.epsilon),
        "sweep_covers": sweep.verdict == COVERS,
        "log_min_geq_epsilon": log_min >= ce.epsilon - tol_geom,
        "certificate_valid": ce.certificate.validate(ce.body, tol_geom=tol_geom),
    }


def _sweep_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if n in (2, 3):
        return direction_grid(n, count)
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _as_rng(rng) -> tuple[np.random.Generator, int | None]:
    if rng is None:
        return np.random.default_rng(0), 0
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng)), int(rng)
    return rng, None


def _build_touching_counterexample(kc: Polytope, rng: np.random.Generator, restarts: int,
                  directions: int, sweep_count: int, tol_geom: float,
                  require_full_dim: bool, seed: int | None) -> Counterexample:
    """Shared engine: normals -> simplex -> touching -> gap -> contradiction.

    Needs at least n+1 canonical vertices; full dimensionality is optional
    because the facet-interior touching argument never uses it.  The emitted
    epsilon is the minimum over the estimation directions, the verification
    sweep's own directions, and the local refinement, so the verification
    sweep of the inflated body covers by construction and independent
    replays at the same sample count reproduce the verdict.
    """
    n = kc.dim
    last_error = "no attempt succeeded"
    for _ in range(max(1, restarts)):
        try:
            sel = _select_normals(kc, rng, restarts=1, tol_geom=tol_geom,
                                  require_full_dim=require_full_dim)
        except ConstructionError as exc:
            last_error = str(exc)
            continue
        try:
            simplex = circumscribe_simplex(kc, sel)
        except ValueError as exc:
            last_error = f"circumscription failed: {exc}"
            continue
        if not verify_touching(kc, simplex, tol_geom=tol_geom):
            last_error = "touching hypothesis failed; reselecting"
            continue
        est_dirs = _sweep_directions(n, directions, rng)
        ver_dirs = _sweep_directions(n, sweep_count, np.random.default_rng(0))
        dirs = np.vstack([est_dirs, ver_dirs])
        sigmas = direction_sigmas(kc, simplex, dirs)
        eps = _refine_epsilon(kc, simplex, dirs, sigmas, rng, refine_steps=40)
        if eps <= 1.0 + max(tol_geom, EPSILON_FLOOR):
            last_error = f"inflation gap too thin (eps={eps:.6g}); reselecting"
            continue
        inflated = scale(kc, eps)
        fits, _ = translate_fits(inflated, simplex, tol_geom=tol_geom)
        sweep = shadow_sweep(inflated, simplex, n - 1, count=sweep_count,
                             tol_geom=tol_geom)
        fitres = scale_fit(kc, simplex)
        checks = {
            "circumscribes": abs(fitres.sigma - 1.0) <= 10.0 * tol_geom,
            "epsilon_gt_one": eps > 1.0 + tol_geom,
            "translate_excluded": not fits,
            "sweep_covers": sweep.verdict == COVERS,
        }
        if not all(checks.values()):
            last_error = f"invariant replay failed: {checks}"
            continue
        return Counterexample(
            body=kc,
            cover=simplex,
            epsilon=eps,
            d=n - 1,
            sample_log={"kind": "hyperplane_normals", "vectors": dirs, "sigmas": sigmas},
            certificate=sel,
            checks=checks,
            seed=seed,
        )
    raise ConstructionError(f"counterexample construction failed: {last_error}")


def build_counterexample(k: Polytope, rng=None, restarts: int = 50,
                         directions: int = 1200, sweep_count: int = 1000,
                         tol_geom: float = TOL_GEOM) -> Counterexample:
    """Counterexample for a full-dimensional body with >= n+1 vertices.

    Emits a simplex circumscribing K and an inflation factor epsilon > 1
    such that every sampled hyperplane shadow of epsilon * K fits inside the
    simplex's shadow while epsilon * K itself cannot fit (LP-certified,
    Farkas-backed through the replay helpers).
    """
    generator, seed = _as_rng(rng)
    kc = canonicalize(k)
    n = kc.dim
    if affine_dim(kc) != n:
        raise ValueError(
            "body is not full-dimensional; use build_counterexample_d for flat bodies")
    if kc.nverts < n + 1:
        raise ValueError(f"need at least {n + 1} canonical vertices, got {kc.nverts}")
    return _build_touching_counterexample(kc, generator, restarts, directions, sweep_count,
                         tol_geom, require_full_dim=True, seed=seed)


def build_counterexample_d(k: Polytope, d: int, rng=None, restarts: int = 50,
                           directions: int = 1200, sweep_count: int = 1000,
                           lift_checks: int = 100,
                           tol_geom: float = TOL_GEOM) -> Counterexample:
    """Counterexample whose d-dimensional shadows cover those of K.

    Full-dimensional bodies delegate to the hyperplane construction; every
    d-subspace lies inside some hyperplane, so the covering transfers, and a
    fresh sweep at the requested d re-checks the verdict.  Flat bodies are
    rebuilt inside a flat of dimension max(dim K, d+1): when d < dim K the
    construction runs in the body's own affine hull and lifts back; when
    d >= dim K the circumscribing simplex is grown around the flat body
    directly inside the padded flat.  Needs at least d+2 canonical vertices.
    """
    generator, seed = _as_rng(rng)
    kc = canonicalize(k)
    n = kc.dim
    if not (1 <= d <= n - 1):
        raise ValueError(f"need 1 <= d <= {n - 1}, got {d}")
    if kc.nverts < d + 2:
        raise ValueError(
            f"the hypothesis needs at least d+2 = {d + 2} canonical vertices, got {kc.nverts}")
    m = affine_dim(kc)
    if m == n:
        ce = _build_touching_counterexample(kc, generator, restarts, directions, sweep_count,
                           tol_geom, require_full_dim=True, seed=seed)
        return _at_shadow_dim(ce, d, sweep_count, tol_geom)

    nprime = max(m, d + 1)
    if nprime == n:
        # flat body whose cover must be full-dimensional: grow the simplex
        # around the flat body directly in the ambient space (the touching
        # argument never needs a full-dimensional body)
        ce = _build_touching_counterexample(kc, generator, restarts, directions, sweep_count,
                           tol_geom, require_full_dim=False, seed=seed)
        return _at_shadow_dim(ce, d, sweep_count, tol_geom)

    # recursion route: build inside the flat of dimension n' < n, then lift
    p0 = kc.vertices.mean(axis=0)
    diffs = kc.vertices - p0
    _, _, vt = np.linalg.svd(diffs, full_matrices=True)
    frame = vt[:nprime].T  # hull directions first, arbitrary padding after
    k_flat = canonicalize(Polytope(diffs @ frame))
    ce_flat = _build_touching_counterexample(k_flat, generator, restarts, directions, sweep_count,
                            tol_geom, require_full_dim=(m == nprime), seed=seed)

    body = kc
    cover = Polytope(ce_flat.cover.vertices @ frame.T + p0, canonical=True)
    certificate = NormalSelection(ce_flat.certificate.normals @ frame.T,
                                  ce_flat.certificate.touch_indices,
                                  ce_flat.certificate.coefficients)
    eps = ce_flat.epsilon

    # fold the ambient verification samples into epsilon, then certify the
    # lift on sampled ambient d-subspaces
    ver_subs = sweep_subspaces(n, d, sweep_count, rng=np.random.default_rng(0))
    lift_subs = [haar_subspace(n, d, generator) for _ in range(lift_checks)]
    bases, sigmas = [], []
    for eta in ver_subs + lift_subs:
        fit = shadow_fit(body, cover, eta)
        bases.append(eta.basis)
        sigmas.append(math.inf if fit.degenerate else fit.sigma)
    sigmas = np.asarray(sigmas)
    finite = sigmas[np.isfinite(sigmas)]
    if finite.size:
        eps = min(eps, float(np.min(finite)))
    if eps <= 1.0 + max(tol_geom, EPSILON_FLOOR):
        raise ConstructionError(f"ambient inflation gap too thin (eps={eps:.6g})")

    inflated = scale(body, eps)
    for eta in lift_subs:
        rep = flat_lift_check(inflated, cover, eta, tol_geom=tol_geom)
        if not (rep.applicable and rep.holds):
            raise ConstructionError(
                f"flat lift failed on a sampled subspace (sigma={rep.sigma_ambient:.6g})")
    fits, _ = translate_fits(inflated, cover, tol_geom=tol_geom)
    sweep = shadow_sweep(inflated, cover, d, count=sweep_count, tol_geom=tol_geom)
    fitres = scale_fit(body, cover)
    checks = {
        "circumscribes": abs(fitres.sigma - 1.0) <= 10.0 * tol_geom,
        "epsilon_gt_one": eps > 1.0 + tol_geom,
        "translate_excluded": not fits,
        "sweep_covers": sweep.verdict == COVERS,
        "flat_lift_certified": True,
    }
    if not all(checks.values()):
        raise ConstructionError(f"lifted counterexample failed replay: {checks}")
    return Counterexample(
        body=body,
        cover=cover,
        epsilon=eps,
        d=d,
        sample_log={"kind": "subspace_bases", "vectors": np.asarray(bases), "sigmas": sigmas},
        certificate=certificate,
        checks=checks,
        seed=seed,
    )


def _at_shadow_dim(ce: Counterexample, d: int, sweep_count: int,
                   tol_geom: float) -> Counterexample:
    """Re-emit a hyperplane counterexample at a lower shadow dimension.

    Lower-dimensional sweep sigmas can only exceed the hyperplane ones, but
    the verdict is still re-checked (and epsilon lowered to any observed
    sample) rather than assumed.
    """
    if d == ce.d:
        return ce
    subs = sweep_subspaces(ce.body.dim, d, sweep_count, rng=np.random.default_rng(0))
    sigmas = np.empty(len(subs))
    for i, eta in enumerate(subs):
        fit = shadow_fit(ce.body, ce.cover, eta)
        sigmas[i] = math.inf if fit.degenerate else fit.sigma
    finite = sigmas[np.isfinite(sigmas)]
    eps = min(ce.epsilon, float(np.min(finite))) if finite.size else ce.epsilon
    if eps <= 1.0 + max(tol_geom, EPSILON_FLOOR):
        raise ConstructionError("lower-dimensional sweep erased the inflation gap")
    sweep = shadow_sweep(scale(ce.body, eps), ce.cover, d, count=sweep_count,
                         tol_geom=tol_geom)
    checks = dict(ce.checks)
    checks["sweep_covers"] = sweep.verdict == COVERS
    if sweep.verdict != COVERS:
        raise ConstructionError("lower-dimensional sweep found a violation")
    log = {"kind": "subspace_bases", "vectors": np.asarray([s.basis for s in subs]),
           "sigmas": sigmas}
    return Counterexample(ce.body, ce.cover, eps, d, log, ce.certificate,
                          checks, ce.seed)


def canonical_tetra_quad() -> tuple[Polytope, Polytope]:
    """The regular tetrahedron and its inscribed planar quadrilateral.

    The quadrilateral takes one vertex from the relative interior of each
    facet: the average of the endpoints of the facet's intersection segment
    with the plane z = 0.  Deterministic, and verified to satisfy the
    touching hypothesis before returning.
    """
    verts = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                      [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    delta = Polytope(verts, canonical=True)
    quad_pts = []
    for j in range(4):
        facet = [i for i in range(4) if i != j]
        crossings = []
        for a in range(3):
            for b in range(a + 1, 3):
                p, q = verts[facet[a]], verts[facet[b]]
                if (p[2] > 0) == (q[2] > 0):
                    continue
                s = p[2] / (p[2] - q[2])
                crossings.append(p + s * (q - p))
        if len(crossings) != 2:
            raise AssertionError("tetrahedron facet must cross z=0 in a segment")
        quad_pts.append(0.5 * (crossings[0] + crossings[1]))
    quad = Polytope(np.array(quad_pts), canonical=True)
    if not verify_touching(quad, delta):
        raise AssertionError("canonical quadrilateral must touch every facet interior")
    return delta, quad
