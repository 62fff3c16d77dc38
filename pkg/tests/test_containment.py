import math

import numpy as np
import pytest

from oracles import grid_scale_fit_2d

from shadowcover.bodies import Polytope, canonicalize, point_in_hull, scale, support, translate
from shadowcover.containment import (
    circumscribing_simplex_witness,
    fit_translation,
    inscribed_equivalence_check,
    min_subset_sigma,
    replay_fit,
    scale_fit,
    subset_witness,
    translate_fits,
)

UNIT_SQUARE = Polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], canonical=True)
TRIANGLE = Polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], canonical=True)


def square(side, corner=(0.0, 0.0)):
    cx, cy = corner
    return Polytope([[cx, cy], [cx + side, cy], [cx, cy + side], [cx + side, cy + side]],
                    canonical=True)


def test_scale_fit_identical_bodies():
    fit = scale_fit(UNIT_SQUARE, UNIT_SQUARE)
    assert fit.status == "ok"
    assert fit.sigma == pytest.approx(1.0, abs=1e-9)


def test_scale_fit_homothety():
    fit = scale_fit(UNIT_SQUARE, square(2.0))
    assert fit.sigma == pytest.approx(2.0, abs=1e-9)


def test_scale_fit_reflected_triangle_known_ratio():
    # reflected simplex fits at exactly 1/n
    neg = Polytope(-TRIANGLE.vertices)
    fit = scale_fit(neg, TRIANGLE)
    assert fit.sigma == pytest.approx(0.5, abs=1e-9)
    oracle = grid_scale_fit_2d(neg.vertices, TRIANGLE.vertices)
    assert abs(fit.sigma - oracle) <= 2e-3


def test_scale_fit_triangle_in_square():
    fit = scale_fit(TRIANGLE, UNIT_SQUARE)
    assert fit.sigma == pytest.approx(1.0, abs=1e-9)
    oracle = grid_scale_fit_2d(TRIANGLE.vertices, UNIT_SQUARE.vertices)
    assert abs(fit.sigma - oracle) <= 2e-3


def test_scale_fit_single_point_degenerate():
    pt = Polytope([[0.3, 0.4]])
    fit = scale_fit(pt, UNIT_SQUARE)
    assert fit.degenerate
    assert fit.sigma == math.inf


def test_scale_fit_certificate_replay():
    rng = np.random.default_rng(5)
    for _ in range(15):
        k = Polytope(rng.standard_normal((5, 2)))
        l = Polytope(rng.standard_normal((6, 2)) * 1.5)
        fit = scale_fit(k, l)
        assert replay_fit(k, l, fit)


def test_translate_fits_verdicts():
    ok, v = translate_fits(UNIT_SQUARE, square(2.0))
    assert ok
    shifted = UNIT_SQUARE.vertices + v
    assert all(point_in_hull(x, square(2.0)) for x in shifted)
    bad, w = translate_fits(square(2.0), UNIT_SQUARE)
    assert not bad and w is None
    same, v0 = translate_fits(UNIT_SQUARE, UNIT_SQUARE)
    assert same
    assert np.allclose(UNIT_SQUARE.vertices + v0, UNIT_SQUARE.vertices, atol=1e-7)


def test_fit_translation_fixed_scale():
    v = fit_translation(UNIT_SQUARE, square(3.0), t=2.0)
    assert v is not None
    assert all(point_in_hull(2.0 * x + v, square(3.0)) for x in UNIT_SQUARE.vertices)
    assert fit_translation(square(2.0), UNIT_SQUARE, t=1.0) is None


def test_scale_fit_translation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(10):
        k = Polytope(rng.standard_normal((5, 3)))
        l = Polytope(rng.standard_normal((6, 3)) * 1.3)
        base = scale_fit(k, l).sigma
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        moved = scale_fit(translate(k, a), translate(l, b)).sigma
        assert moved == pytest.approx(base, abs=1e-9)


def test_scale_fit_scaling_covariance():
    rng = np.random.default_rng(13)
    for _ in range(10):
        k = Polytope(rng.standard_normal((5, 2)))
        l = Polytope(rng.standard_normal((6, 2)))
        c = float(rng.uniform(0.5, 2.5))
        base = scale_fit(k, l).sigma
        scaled = scale_fit(scale(k, c), l).sigma
        assert scaled == pytest.approx(base / c, rel=1e-9)


def test_scale_fit_monotone_in_target():
    rng = np.random.default_rng(17)
    for _ in range(10):
        k = Polytope(rng.standard_normal((5, 2)))
        l = Polytope(rng.standard_normal((5, 2)))
        bigger = Polytope(np.vstack([l.vertices, rng.standard_normal((3, 2)) * 2.0]))
        assert scale_fit(k, l).sigma <= scale_fit(k, bigger).sigma + 1e-6


def test_lp_vs_grid_oracle_random_pairs():
    rng = np.random.default_rng(101)
    checked = 0
    while checked < 12:
        k = Polytope(rng.standard_normal((int(rng.integers(4, 9)), 2)))
        l = Polytope(rng.standard_normal((int(rng.integers(4, 9)), 2)))
        fit = scale_fit(k, l)
        if fit.degenerate:
            continue
        oracle = grid_scale_fit_2d(k.vertices, l.vertices)
        assert abs(fit.sigma - oracle) <= 2e-3
        checked += 1


def test_subset_witness_found_and_replays():
    shrunk = scale(UNIT_SQUARE, 0.99)
    w = subset_witness(UNIT_SQUARE, shrunk, 3)
    assert w is not None and len(w) == 3
    sub = Polytope(UNIT_SQUARE.vertices[w])
    assert scale_fit(sub, shrunk).sigma < 1.0


def test_subset_witness_none_when_fits():
    big = square(10.0, corner=(-5.0, -5.0))
    assert subset_witness(TRIANGLE, big, 3) is None


def test_subset_witness_segment_endpoints():
    k = Polytope([[0.0], [2.0]], canonical=True)
    l = Polytope([[0.0], [1.0]], canonical=True)
    assert subset_witness(k, l, 2) == [0, 1]


def test_helly_vertex_reduction():
    # every (n+1)-subset fits  =>  the whole body fits
    rng = np.random.default_rng(23)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        k = canonicalize(Polytope(rng.standard_normal((6, n))))
        l = Polytope(rng.standard_normal((7, n)) * 1.5)
        if subset_witness(k, l, n + 1) is None:
            ok, _ = translate_fits(k, l)
            assert ok


def test_equivalence_check_randomized():
    rng = np.random.default_rng(31)
    hard_failures = 0
    for _ in range(30):
        n = int(rng.integers(2, 4))
        k = canonicalize(Polytope(rng.standard_normal((6, n))))
        l0 = Polytope(rng.standard_normal((6, n)))
        base = scale_fit(k, l0)
        if base.degenerate or base.sigma <= 0:
            continue
        target = float(rng.choice([0.7, 1.3]))
        l = scale(l0, target / base.sigma)
        rep = inscribed_equivalence_check(k, l, n + 1, n)
        if rep.hard_failure:
            hard_failures += 1
        if not rep.borderline:
            assert rep.agrees
            assert rep.fits == (target > 1.0)
    assert hard_failures == 0


def test_min_subset_sigma_matches_witness_verdict():
    shrunk = scale(UNIT_SQUARE, 0.9)
    assert min_subset_sigma(UNIT_SQUARE, shrunk, 3) < 1.0
    assert min_subset_sigma(TRIANGLE, square(5.0, corner=(-2.0, -2.0)), 3) > 1.0


def test_circumscribing_simplex_witness_square_pair():
    k = square(2.0)
    l = UNIT_SQUARE
    rng = np.random.default_rng(7)
    simplex = circumscribing_simplex_witness(k, l, restarts=100, rng=rng)
    assert simplex is not None
    # the simplex contains L ...
    for u in simplex_outer_normals(simplex):
        assert support(l, u) <= support(simplex, u) + 1e-7
    # ... but K does not fit in it
    assert scale_fit(k, simplex).sigma < 1.0


def simplex_outer_normals(s):
    from shadowcover.bodies import simplex_facet_normals
    normals, _ = simplex_facet_normals(s)
    return normals


def test_circumscribing_simplex_witness_precondition():
    with pytest.raises(ValueError, match="no circumscribing"):
        circumscribing_simplex_witness(UNIT_SQUARE, square(2.0), 10,
                                       np.random.default_rng(0))


def test_circumscribing_witness_thin_rectangle():
    rect = Polytope([[0, 0], [4.0, 0], [0, 0.2], [4.0, 0.2]], canonical=True)
    ok, _ = translate_fits(rect, UNIT_SQUARE)
    assert not ok
    simplex = circumscribing_simplex_witness(rect, UNIT_SQUARE, restarts=200,
                                             rng=np.random.default_rng(3))
    assert simplex is not None
    assert scale_fit(rect, simplex).sigma < 1.0
