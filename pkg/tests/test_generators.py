from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphaconcave import bodies
from alphaconcave.bodies import Polytope
from alphaconcave.generators import (
    generate_random_affine,
    generate_random_alpha_concave,
    generate_random_logconcave,
    generate_random_polytope,
    generate_random_quasiconcave,
    make_rng,
)
from alphaconcave.grids import BoxDomain, GridFunction, is_alpha_concave
from alphaconcave.means import Alpha

GOLDEN = Path(__file__).parent / "golden"


def test_logconcave_golden():
    want = GridFunction.from_text((GOLDEN / "logconcave_seed1_n1_k3.txt").read_text())
    got = generate_random_logconcave(1, 1, 3)
    assert got.domain == want.domain
    np.testing.assert_array_equal(got.values, want.values)


def test_polytope_golden():
    want = Polytope.from_text((GOLDEN / "polytope_seed1_n2_m3.txt").read_text())
    got = generate_random_polytope(1, 2, 3)
    np.testing.assert_array_equal(got.vertices, want.vertices)
    assert len(got.vertices) == 3


def test_rng_is_philox():
    assert isinstance(make_rng(0).bit_generator, np.random.Philox)
    with pytest.raises(ValueError):
        make_rng(-1)


def test_single_piece_without_quadratic_is_affine_exponential():
    d = BoxDomain.centered(3.0, 31)
    f = generate_random_logconcave(5, 1, 1, d, quadratic=False)
    second = np.diff(f.neglog, 2)
    np.testing.assert_allclose(second, 0.0, atol=1e-12)


@given(seed=st.integers(0, 2**32), n=st.sampled_from([1, 2]), k=st.integers(1, 5))
@settings(max_examples=25, deadline=None)
def test_logconcave_by_construction(seed, n, k):
    d = BoxDomain.centered(4.0, 33 if n == 1 else 17, n)
    assert is_alpha_concave(generate_random_logconcave(seed, n, k, d), Alpha.zero(), 1e-9).ok


@given(seed=st.integers(0, 2**32), alpha=st.sampled_from([-0.5, -1.0, -2.0]))
@settings(max_examples=25, deadline=None)
def test_alpha_concave_by_construction(seed, alpha):
    d = BoxDomain.centered(4.0, 17, 2)
    assert is_alpha_concave(generate_random_alpha_concave(seed, 2, 3, alpha, d), alpha, 1e-9).ok


@given(seed=st.integers(0, 2**32), n=st.sampled_from([1, 2, 3]), extra=st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_polytope_is_normalised_and_full(seed, n, extra):
    P = generate_random_polytope(seed, n, n + 1 + extra)
    assert P.is_full
    assert (np.linalg.norm(P.vertices, axis=1) <= 1 + 1e-12).all()
    again = Polytope(P.vertices)
    assert len(again.vertices) == len(P.vertices)


def test_simplex_when_minimal():
    P = generate_random_polytope(11, 3, 4)
    assert len(P.vertices) == 4
    with pytest.raises(ValueError):
        generate_random_polytope(1, 2, 2)


def test_quasiconcave_is_indicator():
    d = BoxDomain.centered(1.1, 33, 2)
    f = generate_random_quasiconcave(4, 2, 7, d)
    assert set(np.unique(f.values)) <= {0.0, 1.0}
    assert is_alpha_concave(f, Alpha.minus_infinity()).ok


@given(seed=st.integers(0, 2**32), n=st.sampled_from([1, 2, 3]))
@settings(max_examples=40, deadline=None)
def test_affine_ranges(seed, n):
    A, x0, C = generate_random_affine(seed, n)
    assert 0.2 - 1e-12 <= abs(np.linalg.det(A)) <= 5.0 + 1e-12
    assert np.linalg.cond(A) <= 3.0 + 1e-9
    assert (np.abs(x0) <= 1).all() and 0.5 <= C <= 2.0


def test_same_seed_same_instance():
    a = generate_random_alpha_concave(9, 2, 3, -1.0, BoxDomain.centered(3.0, 9, 2))
    b = generate_random_alpha_concave(9, 2, 3, -1.0, BoxDomain.centered(3.0, 9, 2))
    np.testing.assert_array_equal(a.values, b.values)
    assert bodies.volume(generate_random_polytope(2, 3, 8)) == bodies.volume(generate_random_polytope(2, 3, 8))
