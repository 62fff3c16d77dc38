"""Mean width and diameter numerics.

W(K) = (2 / (n omega_n)) * integral of h_K over the unit sphere, which a
Monte Carlo average of 2 h_K(u) estimates directly.  Exact closed forms back
the estimator in the plane (perimeter / pi) and in R^3 (edge lengths times
exterior dihedral angles over 4 pi), and the Grassmannian average of planar
shadow widths must reproduce the spatial value (Kubota consistency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    Polytope,
    affine_dim,
    canonicalize,
    diameter,
    edges,
    project,
    support,
    translate,
)
from .containment import scale_fit, subset_witness, translate_fits
from .core import TOL_GEOM, direction_grid, haar_subspace, hyperplane_basis

# unit-ball volumes omega_n, exact pi expressions in 64-bit
BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0, 4: math.pi ** 2 / 2.0}


@dataclass(frozen=True, eq=False)
class MeanWidthEstimate:
    value: float
    stderr: float
    samples: int


def mean_width_mc(k: Polytope, n_samples: int, rng: np.random.Generator) -> MeanWidthEstimate:
    """Monte Carlo mean width: 2 * mean of h_K over uniform unit directions.

    The sphere-area factor cancels against the normalization, leaving the
    direction average of twice the support function; the standard error of
    that average is reported alongside.
    """
    if n_samples < 1000:
        raise ValueError("mean width MC needs at least 1000 samples")
    g = rng.standard_normal((n_samples, k.dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    h = np.max(k.vertices @ g.T, axis=0)
    value = 2.0 * float(h.mean())
    stderr = 2.0 * float(h.std(ddof=1)) / math.sqrt(n_samples)
    return MeanWidthEstimate(value, stderr, n_samples)


def _ordered_hull_2d(points: np.ndarray) -> np.ndarray:
    """Canonical 2D vertices in counterclockwise order around their centroid."""
    center = points.mean(axis=0)
    ang = np.arctan2(points[:, 1] - center[1], points[:, 0] - center[0])
    return points[np.argsort(ang)]


def _perimeter_2d(k: Polytope) -> float:
    kc = canonicalize(k)
    hull = _ordered_hull_2d(kc.vertices)
    diffs = np.roll(hull, -1, axis=0) - hull
    return float(np.linalg.norm(diffs, axis=1).sum())


def _edge_exterior_angle(v: np.ndarray, i: int, j: int) -> float:
    """Angular measure of the normal arc of edge (i, j) in the plane
    orthogonal to the edge: the exterior dihedral angle."""
    e = v[j] - v[i]
    e = e / np.linalg.norm(e)
    frame = hyperplane_basis(e)  # 3 x 2
    rel = v[i] - v  # pointing from every other vertex toward v[i]
    a = rel @ frame[:, 0]
    b = rel @ frame[:, 1]
    keep = np.hypot(a, b) > 1e-12
    if not keep.any():
        return 2.0 * math.pi
    theta = np.arctan2(b[keep], a[keep])
    # each constraint allows a closed half-circle around theta_k; center the
    # common window on the circular mean before intersecting
    mean = math.atan2(float(np.sin(theta).sum()), float(np.cos(theta).sum()))
    shifted = np.mod(theta - mean + math.pi, 2.0 * math.pi) - math.pi
    lo = float(shifted.max()) - math.pi / 2.0
    hi = float(shifted.min()) + math.pi / 2.0
    return max(0.0, hi - lo)


def mean_width_exact(k: Polytope) -> float:
    """Closed-form mean width for full-dimensional bodies in R^2 or R^3.

    Plane: perimeter / pi (Cauchy).  Space: sum of edge length times
    exterior dihedral angle, divided by 4 pi; the dihedral angles come from
    exact normal-arc measures, no facet enumeration.
    """
    n = k.dim
    if n == 2:
        if affine_dim(k) != 2:
            raise ValueError("exact mean width needs a full-dimensional body")
        return _perimeter_2d(k) / math.pi
    if n == 3:
        if affine_dim(k) != 3:
            raise ValueError("exact mean width needs a full-dimensional body")
        kc = canonicalize(k)
        total = 0.0
        for i, j in edges(kc):
            length = float(np.linalg.norm(kc.vertices[j] - kc.vertices[i]))
            total += length * _edge_exterior_angle(kc.vertices, i, j)
        return total / (4.0 * math.pi)
    raise ValueError("exact mean width implemented for n in {2, 3} only")


@dataclass(frozen=True, eq=False)
class KubotaReport:
    width_exact: float
    width_projected_mean: float
    stderr: float
    rel_error: float
    samples: int


def kubota_check(k: Polytope, n_subspaces: int, rng: np.random.Generator) -> KubotaReport:
    """Compare the spatial mean width against the Haar average of planar
    shadow mean widths over sampled 2-subspaces."""
    if affine_dim(k) != 3:
        raise ValueError("Kubota check needs a full-dimensional body in R^3")
    w3 = mean_width_exact(k)
    vals = np.empty(n_subspaces)
    for i in range(n_subspaces):
        xi = haar_subspace(3, 2, rng)
        vals[i] = mean_width_exact(project(k, xi))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1)) / math.sqrt(n_subspaces)
    return KubotaReport(w3, mean, stderr, abs(mean - w3) / abs(w3), n_subspaces)


@dataclass(frozen=True, eq=False)
class CorollaryReport:
    """Numeric evaluation of the same-diameter and same-mean-width criteria."""

    triangle_condition: bool
    diameter_k: float
    diameter_l: float
    diameters_equal: bool
    width_k: float
    width_l: float
    widths_equal: bool
    diameter_applicable: bool
    diameter_holds: bool | None
    width_applicable: bool
    width_holds: bool | None


def corollary_checks(k: Polytope, l: Polytope, d: int, samples: int = 256,
                     tol_geom: float = TOL_GEOM) -> CorollaryReport:
    """Evaluate the diameter and mean-width containment criteria.

    Hypotheses: every triangle in K translates into L (checked by the
    3-vertex subset witness over canonical vertices), plus equality of
    diameters or mean widths within tolerance.  Conclusions: L contains a
    translate of K, respectively K and L are translates (fits both ways and
    matched support functions on a direction grid).  Instances violating a
    hypothesis are reported not applicable, never failed.
    """
    if d < 2:
        raise ValueError("the corollaries need shadow dimension d >= 2")
    kc = canonicalize(k)
    lc = canonicalize(l)
    scale_ref = max(1.0, diameter(lc))
    triangle_ok = subset_witness(kc, lc, 3, tol_geom=tol_geom) is None
    dk, dl = diameter(kc), diameter(lc)
    wk, wl = mean_width_exact(kc), mean_width_exact(lc)
    diam_eq = abs(dk - dl) <= tol_geom * scale_ref
    width_eq = abs(wk - wl) <= tol_geom * scale_ref

    diameter_applicable = triangle_ok and diam_eq
    diameter_holds = None
    if diameter_applicable:
        diameter_holds, _ = translate_fits(kc, lc, tol_geom=tol_geom)

    width_applicable = triangle_ok and width_eq
    width_holds = None
    if width_applicable:
        width_holds = _are_translates(kc, lc, samples, tol_geom, scale_ref)

    return CorollaryReport(
        triangle_condition=triangle_ok,
        diameter_k=dk, diameter_l=dl, diameters_equal=diam_eq,
        width_k=wk, width_l=wl, widths_equal=width_eq,
        diameter_applicable=diameter_applicable, diameter_holds=diameter_holds,
        width_applicable=width_applicable, width_holds=width_holds,
    )


def _are_translates(k: Polytope, l: Polytope, samples: int, tol_geom: float,
                    scale_ref: float) -> bool:
    """Numeric translate-equality: unit fits both ways plus matched support
    functions on a direction grid after aligning (tolerance-banded, not exact)."""
    fit_kl = scale_fit(k, l)
    fit_lk = scale_fit(l, k)
    if fit_kl.degenerate or fit_lk.degenerate:
        return k.nverts == 1 and l.nverts == 1
    if abs(fit_kl.sigma - 1.0) > 10.0 * tol_geom or abs(fit_lk.sigma - 1.0) > 10.0 * tol_geom:
        return False
    ok, v = translate_fits(k, l, tol_geom=tol_geom)
    if not ok:
        return False
    moved = translate(k, v)
    dirs = direction_grid(k.dim, max(8, samples))
    for u in dirs:
        if abs(support(moved, u) - support(l, u)) > 100.0 * tol_geom * scale_ref:
            return False
    return True
