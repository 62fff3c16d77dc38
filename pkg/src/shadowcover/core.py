"""Scalar conventions, small dense linear algebra, and direction/subspace sampling.

Two tolerances are used everywhere:

* ``TOL_FEAS`` (1e-9) governs LP feasibility and incidence decisions.
* ``TOL_GEOM`` (1e-6) governs geometric verdict margins (fits / fails bands).

Both can be overridden per call through keyword arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_FEAS = 1e-9
TOL_GEOM = 1e-6

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def as_vector(v, n: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float64 array, optionally checking its length."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def unit(v) -> np.ndarray:
    """Normalize a nonzero vector to unit length."""
    arr = as_vector(v)
    norm = float(np.linalg.norm(arr))
    if norm <= TOL_FEAS:
        raise ValueError("cannot normalize a (near-)zero vector")
    return arr / norm


@dataclass(frozen=True, eq=False)
class Subspace:
    """A d-dimensional linear subspace of R^n, stored as an n x d orthonormal basis.

    Points of the Grassmannian G(n, d).  The orthonormality invariant
    (basis^T basis = I within ``TOL_FEAS``) is checked on construction.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[1] < 1 or b.shape[0] < b.shape[1]:
            raise ValueError(f"basis must be n x d with 1 <= d <= n, got shape {b.shape}")
        gram = b.T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e2 * TOL_FEAS:
            raise ValueError("basis columns are not orthonormal")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.basis.shape[1]


def orthonormalize(m) -> Subspace:
    """Orthonormalize the columns of an n x d matrix into a Subspace.

    The returned basis spans the same column space.  Idempotent: feeding a
    returned basis back in reproduces it within ``TOL_FEAS``.

    Raises ``ValueError`` ("degenerate basis") when the numerical rank of the
    input is below d.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] < a.shape[1]:
        raise ValueError(f"more columns than rows: shape {a.shape}")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= TOL_FEAS * max(1.0, sv[0]):
        raise ValueError("degenerate basis")
    q, r = np.linalg.qr(a)
    # fix signs so the decomposition is unique and idempotent
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return Subspace(q * signs)


def haar_subspace(n: int, d: int, rng: np.random.Generator) -> Subspace:
    """Sample a subspace from the rotation-invariant measure on G(n, d).

    Orthonormalizes an n x d standard-Gaussian sample; rotation invariance of
    the Gaussian makes the result Haar-distributed.  Deterministic for a
    given generator state.
    """
    if not (1 <= d <= n):
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    while True:
        g = rng.standard_normal((n, d))
        try:
            return orthonormalize(g)
        except ValueError:
            continue  # measure-zero degenerate draw


def direction_grid(n: int, count: int) -> np.ndarray:
    """Deterministic well-spread unit directions: angles in R^2, a Fibonacci
    sphere lattice in R^3.  Returns a (count, n) array.

    Only n in {2, 3} is supported; higher dimensions should use Haar samples.
    """
    if n not in (2, 3):
        raise ValueError("grid unsupported; use haar sampling")
    if count < 4:
        raise ValueError(f"count must be >= 4, got {count}")
    if n == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def hyperplane_basis(u) -> np.ndarray:
    """Deterministic orthonormal basis of u-perp for a unit vector u.

    Built from the Householder reflection mapping e1 onto -sign(u[0]) * u;
    its trailing columns span the orthogonal complement of u.
    """
    uu = unit(u)
    n = uu.shape[0]
    if n < 2:
        raise ValueError("hyperplane basis needs ambient dimension >= 2")
    w = uu.copy()
    w[0] += 1.0 if uu[0] >= 0.0 else -1.0
    h = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    return h[:, 1:]
