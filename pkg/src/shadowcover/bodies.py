"""The polytope type and its geometric primitives.

Bodies are V-representations: the convex hull of a finite vertex list, which
may contain redundant generators until a ``canonicalize`` pass removes them
(point-in-hull LP per vertex).  No facet enumeration is performed anywhere;
containment questions reduce to LPs over convex-combination variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import lp
from .core import TOL_FEAS, TOL_GEOM, Subspace, hyperplane_basis, unit


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a finite, nonempty vertex list in R^n.

    ``canonical`` records that no vertex lies in the hull of the others.
    Instances are immutable; all operations return new polytopes.
    """

    vertices: np.ndarray
    canonical: bool = False

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"vertices must be a nonempty (m, n) array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def nverts(self) -> int:
        return self.vertices.shape[0]

    def __repr__(self) -> str:
        return f"Polytope({self.nverts} vertices in R^{self.dim}, canonical={self.canonical})"


def translate(p: Polytope, w) -> Polytope:
    w = np.asarray(w, dtype=np.float64)
    return Polytope(p.vertices + w, canonical=p.canonical)


def scale(p: Polytope, factor: float) -> Polytope:
    if factor == 0.0:
        return Polytope(np.zeros((1, p.dim)), canonical=True)
    return Polytope(p.vertices * float(factor), canonical=p.canonical)


def support(p: Polytope, u) -> float:
    """Support function h_P(u) = max over vertices of x.u (any scale of u)."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (p.dim,):
        raise ValueError(f"direction has shape {u.shape}, expected ({p.dim},)")
    return float(np.max(p.vertices @ u))


def support_set(p: Polytope, u, tol_geom: float = TOL_GEOM) -> list[int]:
    """Indices of vertices attaining the support value within tol_geom * |u|.

    A singleton certifies an exposed point, and u as a regular normal of P.
    """
    u = np.asarray(u, dtype=np.float64)
    norm = float(np.linalg.norm(u))
    if norm <= TOL_FEAS:
        raise ValueError("support set needs a nonzero direction")
    vals = p.vertices @ u
    cutoff = vals.max() - tol_geom * norm
    return [int(i) for i in np.nonzero(vals >= cutoff)[0]]


def project(p: Polytope, s: Subspace) -> Polytope:
    """Orthogonal projection onto a subspace, in d-coordinate representation.

    The support function of the result is the restriction of h_P to the
    subspace: h_{P_S}(w) = h_P(basis @ w).
    """
    if s.n != p.dim:
        raise ValueError(f"subspace lives in R^{s.n}, polytope in R^{p.dim}")
    return Polytope(p.vertices @ s.basis)


def hyperplane_shadow(p: Polytope, u) -> Polytope:
    """Projection onto u-perp in the deterministic Householder frame."""
    return project(p, Subspace(hyperplane_basis(unit(u))))


def linear_image(p: Polytope, m) -> Polytope:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != p.dim:
        raise ValueError(f"matrix shape {m.shape} does not act on R^{p.dim}")
    return Polytope(p.vertices @ m.T)


def affine_dim(p: Polytope) -> int:
    """Dimension of the affine hull (rank of the difference set)."""
    if p.nverts == 1:
        return 0
    diffs = p.vertices[1:] - p.vertices[0]
    sv = np.linalg.svd(diffs, compute_uv=False)
    return int(np.sum(sv > TOL_FEAS * max(1.0, sv[0])))


def diameter(p: Polytope) -> float:
    """Maximal pairwise vertex distance."""
    v = p.vertices
    d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def point_in_hull(x, p: Polytope) -> bool:
    """LP feasibility: does x lie in conv(vertices)?"""
    x = np.asarray(x, dtype=np.float64)
    m = p.nverts
    a = np.vstack([p.vertices.T, np.ones((1, m))])
    b = np.concatenate([x, [1.0]])
    out = lp.feasible(a, b, np.ones(m, dtype=bool))
    return out.status == lp.OPTIMAL


def canonical_vertex_indices(p: Polytope) -> list[int]:
    """Indices (into p.vertices) of the extreme points, by point-in-hull LPs."""
    v = p.vertices
    m = v.shape[0]
    keep = list(range(m))
    # cheap exact-duplicate pass first
    seen: dict[bytes, int] = {}
    dedup = []
    for i in keep:
        key = np.round(v[i], 12).tobytes()
        if key not in seen:
            seen[key] = i
            dedup.append(i)
    keep = dedup
    if len(keep) == 1:
        return keep
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if point_in_hull(v[keep[i]], Polytope(v[others])):
            keep.pop(i)
        else:
            i += 1
    return keep


def canonicalize(p: Polytope) -> Polytope:
    """Remove redundant generators so every vertex is an extreme point."""
    if p.canonical:
        return p
    idx = canonical_vertex_indices(p)
    return Polytope(p.vertices[idx], canonical=True)


def edges(p: Polytope) -> list[tuple[int, int]]:
    """1-skeleton of a canonical 3-polytope.

    A pair (i, j) is an edge iff some direction exposes exactly {i, j};
    decided by an LP maximizing the exposure margin over box-bounded
    directions.
    """
    if not p.canonical:
        raise ValueError("edges requires canonical vertices; call canonicalize first")
    if affine_dim(p) != 3:
        raise ValueError("edges requires a full-dimensional body in R^3")
    n = p.dim
    v = p.vertices
    m = v.shape[0]
    result = []
    for i, j in combinations(range(m), 2):
        if _edge_exposure_margin(v, i, j, n) > TOL_GEOM:
            result.append((i, j))
    return result


def _edge_exposure_margin(v: np.ndarray, i: int, j: int, n: int) -> float:
    """Optimal margin of an LP searching for u with v_i.u = v_j.u = h and
    v_k.u <= h - delta for all other k, subject to |u|_inf <= 1."""
    m = v.shape[0]
    others = [k for k in range(m) if k not in (i, j)]
    no = len(others)
    # columns: u (n free) | h (free) | delta | s_k (no) | box slacks (2n)
    ncols = n + 2 + no + 2 * n
    nrows = 2 + no + 2 * n
    a = np.zeros((nrows, ncols))
    b = np.zeros(nrows)
    a[0, :n] = v[i] - v[j]
    a[1, :n] = v[i]
    a[1, n] = -1.0
    for r, k in enumerate(others):
        a[2 + r, :n] = v[k]
        a[2 + r, n] = -1.0
        a[2 + r, n + 1] = 1.0
        a[2 + r, n + 2 + r] = 1.0
    base = 2 + no
    for cidx in range(n):
        a[base + 2 * cidx, cidx] = 1.0
        a[base + 2 * cidx, n + 2 + no + 2 * cidx] = 1.0
        b[base + 2 * cidx] = 1.0
        a[base + 2 * cidx + 1, cidx] = -1.0
        a[base + 2 * cidx + 1, n + 2 + no + 2 * cidx + 1] = 1.0
        b[base + 2 * cidx + 1] = 1.0
    c = np.zeros(ncols)
    c[n + 1] = 1.0
    nonneg = np.ones(ncols, dtype=bool)
    nonneg[:n + 1] = False
    out = lp.solve(lp.LpProblem(a, b, c, nonneg))
    if out.status != lp.OPTIMAL:
        return 0.0
    return float(out.objective)


def simplex_from_supports(normals: np.ndarray, heights: np.ndarray,
                          cond_limit: float = 1e12) -> Polytope:
    """Vertices of the simplex {x : x.u_i <= h_i} by Cramer-style solves.

    Vertex j solves the n x n system {x.u_i = h_i, i != j}; solvable when any
    n of the normals are independent (guaranteed by the interior-origin
    condition on the normal set).  Raises on ill-conditioned systems.
    """
    normals = np.asarray(normals, dtype=np.float64)
    heights = np.asarray(heights, dtype=np.float64).reshape(-1)
    k, n = normals.shape
    if k != n + 1 or heights.shape[0] != k:
        raise ValueError("need n+1 normals and heights in R^n")
    verts = np.empty((k, n))
    for j in range(k):
        rows = [i for i in range(k) if i != j]
        a = normals[rows]
        if np.linalg.cond(a) > cond_limit:
            raise ValueError("ill-conditioned simplex system")
        verts[j] = np.linalg.solve(a, heights[rows])
    return Polytope(verts, canonical=True)


def simplex_facet_normals(s: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit facet normals and support heights of an n-simplex.

    Facet i is the hull of all vertices except vertex i; the normal is
    oriented away from vertex i.
    """
    v = s.vertices
    k, n = v.shape
    if k != n + 1:
        raise ValueError(f"simplex in R^{n} needs exactly {n + 1} vertices, got {k}")
    normals = np.empty((k, n))
    heights = np.empty(k)
    for j in range(k):
        rows = [i for i in range(k) if i != j]
        base = v[rows[0]]
        diffs = v[rows[1:]] - base
        _, sv, vt = np.linalg.svd(diffs)
        if sv[-1] <= TOL_FEAS * max(1.0, sv[0]):
            raise ValueError("degenerate simplex")
        normal = vt[-1]
        h = float(normal @ base)
        if float(normal @ v[j]) > h:
            normal, h = -normal, -h
        normals[j] = normal
        heights[j] = h
    return normals, heights


def origin_interior_coefficients(dirs: np.ndarray,
                                 tol_geom: float = TOL_GEOM) -> np.ndarray | None:
    """Positive convex coefficients a with sum a_i u_i = 0, when the origin
    lies in the interior of conv(dirs); None otherwise.

    LP: maximize delta s.t. sum a_i u_i = 0, sum a_i = 1, a_i >= delta.
    """
    dirs = np.asarray(dirs, dtype=np.float64)
    k, n = dirs.shape
    # columns: a (k) | delta | slack (k)
    ncols = 2 * k + 1
    a = np.zeros((n + 1 + k, ncols))
    b = np.zeros(n + 1 + k)
    a[:n, :k] = dirs.T
    a[n, :k] = 1.0
    b[n] = 1.0
    for i in range(k):
        a[n + 1 + i, i] = 1.0
        a[n + 1 + i, k] = -1.0
        a[n + 1 + i, k + 1 + i] = -1.0
    c = np.zeros(ncols)
    c[k] = 1.0
    out = lp.solve(lp.LpProblem(a, b, c, np.ones(ncols, dtype=bool)))
    if out.status != lp.OPTIMAL or out.objective <= tol_geom:
        return None
    return out.z[:k].copy()


# --- JSON body format -------------------------------------------------------

def body_to_dict(p: Polytope) -> dict:
    return {"dim": p.dim, "vertices": [[float(x) for x in row] for row in p.vertices]}


def body_from_dict(data) -> Polytope:
    if not isinstance(data, dict) or "dim" not in data or "vertices" not in data:
        raise ValueError("body JSON must be an object with 'dim' and 'vertices'")
    n = data["dim"]
    rows = data["vertices"]
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"'dim' must be a positive integer, got {n!r}")
    if not isinstance(rows, list) or not rows:
        raise ValueError("'vertices' must be a nonempty list of coordinate rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValueError(f"vertex row {i} has {len(row) if isinstance(row, list) else 'no'} "
                             f"coordinates, expected {n}")
    return Polytope(np.asarray(rows, dtype=np.float64))


def read_body(path) -> Polytope:
    with open(path) as fh:
        return body_from_dict(json.load(fh))


def write_body(p: Polytope, path) -> None:
    with open(path, "w") as fh:
        json.dump(body_to_dict(p), fh, indent=2)
        fh.write("\n")
