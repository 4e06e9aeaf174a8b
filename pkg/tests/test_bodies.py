import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from alphaconcave import bodies
from alphaconcave.bodies import Polytope
from alphaconcave.generators import generate_random_polytope, make_rng

SQUARE = Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])
TRIANGLE = Polytope([[0, 0], [1, 0], [0, 1]])
SIMPLEX3 = Polytope(np.vstack([np.zeros(3), np.eye(3)]))
CUBE = Polytope(np.array(np.meshgrid(*[[-1.0, 1.0]] * 3, indexing="ij")).reshape(3, -1).T)


def _is_extreme(p, others):
    # p is extreme iff it is not a convex combination of the other points
    k = len(others)
    res = linprog(np.zeros(k), A_eq=np.vstack([others.T, np.ones(k)]), b_eq=np.append(p, 1.0), bounds=(0, None))
    return res.status != 0


def test_hull_drops_interior_points():
    P = Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1], [0, 0], [0, 1]])
    assert len(P.vertices) == 4
    assert len(TRIANGLE.vertices) == 3


def test_hull_of_disk_sample_matches_lp_oracle():
    rng = make_rng(5)
    th = rng.uniform(0, 2 * np.pi, 50)
    r = np.sqrt(rng.uniform(size=50))
    pts = np.c_[r * np.cos(th), r * np.sin(th)]
    hull = {tuple(v) for v in bodies.convex_hull(pts).vertices}
    for i, p in enumerate(pts):
        assert (tuple(p) in hull) == _is_extreme(p, np.delete(pts, i, axis=0))


def test_hull_3d_and_degenerate():
    pts = np.vstack([CUBE.vertices, np.zeros((1, 3)), [[0.5, 0.5, 0.5]]])
    assert len(Polytope(pts).vertices) == 8
    flat = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0.2, 0.2, 0]])
    assert flat.rank == 2 and not flat.is_full
    assert bodies.volume(flat) == 0.0
    assert len(Polytope([[1.0, 2.0], [1.0, 2.0]]).vertices) == 1
    with pytest.raises(ValueError):
        Polytope(np.zeros((2, 4)))


def test_volumes():
    assert bodies.volume(Polytope([[0, 0], [1, 0], [1, 1], [0, 1]])) == pytest.approx(1.0, abs=1e-15)
    assert bodies.volume(TRIANGLE) == pytest.approx(0.5, abs=1e-15)
    assert bodies.volume(SIMPLEX3) == pytest.approx(1 / 6, abs=1e-15)
    assert bodies.volume(Polytope([[2.0], [-1.0]])) == 3.0


def test_minkowski_examples():
    seg = Polytope([[0.0], [1.0]])
    np.testing.assert_array_equal(bodies.minkowski_sum(seg, seg).vertices, [[0.0], [2.0]])
    hexagon = bodies.difference_body(TRIANGLE)
    assert len(hexagon.vertices) == 6
    assert bodies.volume(hexagon) == pytest.approx(3.0, abs=1e-12)
    moved = bodies.minkowski_sum(TRIANGLE, Polytope([[2.0, -1.0]]))
    assert bodies.vertex_set_distance(moved, Polytope(TRIANGLE.vertices + [2.0, -1.0])) == 0.0
    with pytest.raises(ValueError):
        bodies.minkowski_sum(seg, TRIANGLE)


def test_difference_body_examples():
    assert bodies.volume(bodies.difference_body(SQUARE)) == pytest.approx(4 * bodies.volume(SQUARE))
    ratio = bodies.volume(bodies.difference_body(TRIANGLE)) / bodies.volume(TRIANGLE)
    assert abs(ratio - 6.0) <= 1e-12
    ratio3 = bodies.volume(bodies.difference_body(SIMPLEX3)) / bodies.volume(SIMPLEX3)
    assert abs(ratio3 - 20.0) <= 1e-9
    np.testing.assert_array_equal(bodies.difference_body(Polytope([[0.0], [1.0]])).vertices, [[-1.0], [1.0]])


def test_support_function():
    assert bodies.support_function(SQUARE, [1, 0]) == 1
    assert bodies.support_function(SQUARE, [1, 1]) == 2
    assert bodies.support_function(TRIANGLE, [1, 1]) == 1


def test_polar_examples():
    cross = bodies.polar(SQUARE)
    expected = Polytope([[1, 0], [0, 1], [-1, 0], [0, -1]])
    assert bodies.vertex_set_distance(cross, expected) <= 1e-12
    assert bodies.vertex_set_distance(bodies.polar(cross), SQUARE) <= 1e-12
    assert bodies.volume(bodies.polar(CUBE)) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        bodies.polar(TRIANGLE)  # origin on the boundary


def test_hull_union_examples():
    assert bodies.vertex_set_distance(bodies.hull_union_reflection(SQUARE, [0, 0]), SQUARE) == 0.0
    assert bodies.volume(bodies.hull_union_reflection(TRIANGLE, [0, 0])) == pytest.approx(2.0, abs=1e-12)
    seg = bodies.hull_union_reflection(Polytope([[0.0], [1.0]]), [1.0])
    np.testing.assert_array_equal(seg.vertices, [[0.0], [1.0]])


def test_hull_union_bound_needs_half_point_inside():
    # x in K but x/2 outside K: the volume bound 2^n V(K) fails
    K = Polytope([[1.0], [2.0]])
    U = bodies.hull_union_reflection(K, [1.5])
    assert bodies.volume(U) == pytest.approx(2.5)
    assert bodies.volume(U) > 2 * bodies.volume(K)


def test_intersect_and_duality():
    tri = Polytope([[-1.0, -0.5], [2.0, -0.5], [0.0, 1.5]])
    cap = bodies.intersect(tri, bodies.reflect_body(tri))
    assert bodies.volume(cap) <= bodies.volume(tri)
    for P in (SQUARE, tri, Polytope([[-1.0], [2.0]]), CUBE):
        assert bodies.hull_duality_check(P)


def test_polar_identity_segment_and_square():
    assert bodies.polar_identity_check(Polytope([[-1.0], [1.0]]), 20.0, 4097) == pytest.approx(1.0, abs=0.01)
    assert bodies.polar_identity_check(SQUARE, 20.0, 513) == pytest.approx(1.0, abs=0.02)


def test_text_roundtrip():
    P = generate_random_polytope(3, 3, 9)
    Q = Polytope.from_text(P.to_text())
    assert bodies.vertex_set_distance(P, Q) == 0.0


polytopes = st.builds(
    generate_random_polytope,
    seed=st.integers(0, 10_000),
    n=st.just(2),
    m=st.integers(3, 12),
)


@given(P=polytopes)
@settings(max_examples=60, deadline=None)
def test_rogers_shephard_sandwich(P):
    r = bodies.volume(bodies.difference_body(P)) / bodies.volume(P)
    assert 4.0 * (1 - 1e-12) <= r <= 6.0 * (1 + 1e-12)


@given(seed=st.integers(0, 10_000), m=st.integers(4, 10))
@settings(max_examples=20, deadline=None)
def test_rogers_shephard_sandwich_3d(seed, m):
    P = generate_random_polytope(seed, 3, m)
    r = bodies.volume(bodies.difference_body(P)) / bodies.volume(P)
    assert 8.0 * (1 - 1e-9) <= r <= 20.0 * (1 + 1e-9)


@given(P=polytopes, w=st.lists(st.floats(0.01, 1.0), min_size=12, max_size=12))
@settings(max_examples=60, deadline=None)
def test_hull_union_bound_for_centred_body(P, w):
    K = Polytope(P.vertices - P.vertices.mean(axis=0))
    lam = np.array(w[: len(K.vertices)])
    x = (lam / lam.sum()) @ K.vertices
    assert bodies.volume(bodies.hull_union_reflection(K, x)) <= 4.0 * bodies.volume(K) * (1 + 1e-12)


@given(P=polytopes, seed=st.integers(0, 100), shift=st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
@settings(max_examples=40, deadline=None)
def test_volume_invariance(P, seed, shift):
    rng = make_rng(seed)
    perm = rng.permutation(len(P.vertices))
    th = rng.uniform(0, 2 * np.pi)
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    moved = Polytope(P.vertices[perm] @ R.T + np.array(shift))
    assert bodies.volume(moved) == pytest.approx(bodies.volume(P), rel=1e-10)


@given(P=polytopes, Q=polytopes)
@settings(max_examples=40, deadline=None)
def test_minkowski_monotone(P, Q):
    Q0 = Polytope(Q.vertices - Q.vertices.mean(axis=0))
    assert bodies.volume(bodies.minkowski_sum(P, Q0)) >= bodies.volume(P)
