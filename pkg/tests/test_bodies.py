import numpy as np
import pytest

from shadowcover.bodies import (
    Polytope,
    affine_dim,
    body_from_dict,
    body_to_dict,
    canonicalize,
    diameter,
    edges,
    hyperplane_shadow,
    linear_image,
    origin_interior_coefficients,
    project,
    simplex_facet_normals,
    simplex_from_supports,
    support,
    support_set,
    translate,
)
from shadowcover.core import Subspace, orthonormalize

UNIT_SQUARE = Polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], canonical=True)
TETRA = Polytope([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], canonical=True)
CUBE = Polytope([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], canonical=True)


def test_support_square_diagonal():
    assert support(UNIT_SQUARE, np.array([1.0, 1.0])) == pytest.approx(2.0)


def test_support_segment_orthogonal():
    seg = Polytope([[-1.0, 0.0], [1.0, 0.0]])
    assert support(seg, np.array([0.0, 1.0])) == pytest.approx(0.0)


def test_support_tetrahedron():
    assert support(TETRA, np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)


def test_support_set_edge_and_vertex():
    edge = support_set(UNIT_SQUARE, np.array([1.0, 0.0]))
    got = {tuple(UNIT_SQUARE.vertices[i]) for i in edge}
    assert got == {(1.0, 0.0), (1.0, 1.0)}
    corner = support_set(UNIT_SQUARE, np.array([1.0, 1.0]))
    assert [tuple(UNIT_SQUARE.vertices[i]) for i in corner] == [(1.0, 1.0)]


def test_support_set_homogeneous():
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = Polytope(rng.standard_normal((6, 3)))
        u = rng.standard_normal(3)
        assert support_set(p, u) == support_set(p, 2.0 * u)


def test_project_cube_to_square():
    s = Subspace(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    q = project(CUBE, s)
    assert q.dim == 2
    assert sorted(map(tuple, q.vertices)) == sorted(
        [(0, 0), (0, 0), (0, 1), (0, 1), (1, 0), (1, 0), (1, 1), (1, 1)])


def test_project_tetra_drops_coordinate():
    s = Subspace(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    q = project(TETRA, s)
    assert sorted(map(tuple, q.vertices)) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_project_identity_is_same_body():
    s = Subspace(np.eye(3))
    q = project(TETRA, s)
    assert np.allclose(q.vertices, TETRA.vertices)


def test_projection_support_compatibility():
    # h of the projection equals the restriction of h to the subspace
    rng = np.random.default_rng(8)
    for _ in range(10):
        p = Polytope(rng.standard_normal((7, 4)))
        s = orthonormalize(rng.standard_normal((4, 2)))
        q = project(p, s)
        for _ in range(10):
            w = rng.standard_normal(2)
            assert support(q, w) == pytest.approx(support(p, s.basis @ w), abs=1e-9)


def test_hyperplane_shadow_cube():
    sq = hyperplane_shadow(CUBE, np.array([0.0, 0.0, 1.0]))
    assert sq.dim == 2
    assert diameter(sq) == pytest.approx(np.sqrt(2.0))


def test_hyperplane_shadow_of_aligned_segment_is_point():
    seg = Polytope([[0.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    shadow = hyperplane_shadow(seg, np.array([0.0, 0.0, 1.0]))
    assert np.allclose(shadow.vertices, shadow.vertices[0])


def test_hyperplane_shadow_translates():
    rng = np.random.default_rng(4)
    p = Polytope(rng.standard_normal((6, 3)))
    w = rng.standard_normal(3)
    u = rng.standard_normal(3)
    a = hyperplane_shadow(p, u)
    b = hyperplane_shadow(translate(p, w), u)
    shift = b.vertices[0] - a.vertices[0]
    assert np.allclose(a.vertices + shift, b.vertices, atol=1e-9)


def test_linear_image_identity_and_scaling():
    assert np.allclose(linear_image(TETRA, np.eye(3)).vertices, TETRA.vertices)
    doubled = linear_image(TETRA, 2.0 * np.eye(3))
    u = np.array([0.3, -0.2, 0.9])
    assert support(doubled, u) == pytest.approx(2.0 * support(TETRA, u))


def test_linear_image_rank_deficient_allowed():
    m = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    flat = linear_image(CUBE, m)
    assert affine_dim(flat) == 2


def test_affine_dim_cases():
    assert affine_dim(Polytope([[1.0, 2.0, 3.0]])) == 0
    assert affine_dim(Polytope([[0.0, 0.0], [1.0, 1.0]])) == 1
    sq3 = Polytope([[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]])
    assert affine_dim(sq3) == 2


def test_diameter_cases():
    assert diameter(UNIT_SQUARE) == pytest.approx(np.sqrt(2.0))
    assert diameter(Polytope([[3.0, 4.0]])) == 0.0
    assert diameter(Polytope([[0.0, 0.0], [3.0, 0.0]])) == pytest.approx(3.0)


def test_translation_invariance_of_measures():
    rng = np.random.default_rng(12)
    for _ in range(10):
        p = Polytope(rng.standard_normal((6, 3)))
        w = rng.standard_normal(3)
        q = translate(p, w)
        assert diameter(q) == pytest.approx(diameter(p), abs=1e-9)
        assert affine_dim(q) == affine_dim(p)


def test_canonicalize_removes_interior_and_duplicate_points():
    verts = np.vstack([UNIT_SQUARE.vertices, [[0.5, 0.5], [0.25, 0.75], [1.0, 1.0]]])
    p = canonicalize(Polytope(verts))
    assert p.canonical
    assert sorted(map(tuple, p.vertices)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_canonicalize_keeps_boundary_midpoint_out():
    # a vertex on an edge of the hull is redundant
    tri = Polytope([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    p = canonicalize(tri)
    assert p.nverts == 3


def test_edges_cube():
    got = set(edges(CUBE))
    expect = set()
    v = CUBE.vertices
    for i in range(8):
        for j in range(i + 1, 8):
            if np.sum(np.abs(v[i] - v[j]) > 0.5) == 1:
                expect.add((i, j))
    assert got == expect
    assert len(got) == 12


def test_edges_tetrahedron_complete():
    assert len(edges(TETRA)) == 6


def test_edges_octahedron_no_antipodal():
    octa = Polytope(np.vstack([np.eye(3), -np.eye(3)]), canonical=True)
    got = set(edges(octa))
    assert len(got) == 12
    for i, j in got:
        assert not np.allclose(octa.vertices[i], -octa.vertices[j])


def test_edges_requires_canonical():
    with pytest.raises(ValueError, match="canonical"):
        edges(Polytope(CUBE.vertices))


def test_simplex_from_supports_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(10):
        verts = rng.standard_normal((4, 3))
        if affine_dim(Polytope(verts)) != 3:
            continue
        s = Polytope(verts, canonical=True)
        normals, heights = simplex_facet_normals(s)
        rebuilt = simplex_from_supports(normals, heights)
        assert np.allclose(sorted(map(tuple, rebuilt.vertices)),
                           sorted(map(tuple, s.vertices)), atol=1e-8)
        # normals are outward: every vertex satisfies all inequalities
        assert np.all(verts @ normals.T <= heights[None, :] + 1e-9)


def test_origin_interior_coefficients():
    dirs = np.array([[1.0, 0.0], [-0.5, 1.0], [-0.5, -1.0]])
    coeffs = origin_interior_coefficients(dirs)
    assert coeffs is not None
    assert np.all(coeffs > 0)
    assert np.allclose(coeffs @ dirs, 0.0, atol=1e-8)
    # all in a halfplane: origin not interior
    bad = np.array([[1.0, 0.0], [0.0, 1.0], [0.7, 0.8]])
    assert origin_interior_coefficients(bad) is None


def test_body_json_round_trip():
    d = body_to_dict(TETRA)
    p = body_from_dict(d)
    assert np.allclose(p.vertices, TETRA.vertices)


def test_body_json_ragged_rejected():
    with pytest.raises(ValueError, match="row 1"):
        body_from_dict({"dim": 2, "vertices": [[0.0, 0.0], [1.0]]})
