import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphaconcave.generators import generate_random_logconcave
from alphaconcave.grids import (
    AbsExp,
    BoxDomain,
    Gaussian,
    GridFunction,
    OneDExtremalB,
    OrthantExp,
    SimplexIndicator,
    sample,
)
from alphaconcave.integration import cell_values, default_levels, integrate, layer_cake, superlevel_volume

# [-1, 30] with 993 nodes has spacing 1/32 and puts a node on x = 0
ORTHANT_BOX = BoxDomain((-1.0,), (30.0,), (993,))


def test_orthant_exp_integral():
    assert integrate(sample(OrthantExp(1), ORTHANT_BOX)).value == pytest.approx(1.0, rel=0.005)


def test_orthant_exp_off_lattice_support_is_first_order():
    # with 512 nodes the support edge falls inside a cell, which is lost
    v = integrate(sample(OrthantExp(1), BoxDomain((-1.0,), (30.0,), (512,)))).value
    h = 31 / 511
    assert 1.0 - h <= v < 1.0


@pytest.mark.parametrize("n, nodes", [(1, 1025), (2, 257)])
def test_abs_exp_integral(n, nodes):
    f = sample(AbsExp(n), BoxDomain.centered(30.0, nodes, n))
    assert integrate(f).value == pytest.approx(2.0**n, rel=0.005)


def test_simplex_area():
    d = BoxDomain.cube(-0.5, 1.5, 81, 2)
    f = sample(SimplexIndicator.unit(2), d)
    assert abs(integrate(f).value - 0.5) <= d.spacing[0]
    assert abs(superlevel_volume(f, 0.5) - 0.5) <= d.spacing[0]
    assert abs(layer_cake(f) - 0.5) <= d.spacing[0]


def test_superlevel_examples():
    g = sample(Gaussian((0.0, 0.0)), BoxDomain.centered(3.0, 61, 2))
    assert superlevel_volume(g, 1.0) == 0.0
    f = sample(OrthantExp(1), ORTHANT_BOX)
    h = ORTHANT_BOX.spacing[0]
    assert abs(superlevel_volume(f, math.exp(-1)) - 1.0) <= h
    with pytest.raises(ValueError):
        superlevel_volume(f, -1.0)


def test_layer_cake_examples():
    f = sample(OrthantExp(1), ORTHANT_BOX)
    assert layer_cake(f) == pytest.approx(integrate(f).value, rel=0.02)
    d = BoxDomain.cube(0.0, 2.0, 11, 2)
    c = GridFunction(d, np.full(d.shape, 3.0))
    levels = 3.0 * np.geomspace(1.0, 1e-3, 16)
    step = levels[0] - levels[1]
    assert abs(layer_cake(c, levels) - 3.0 * 4.0) <= step * 4.0
    with pytest.raises(ValueError):
        layer_cake(c, [1.0, 2.0])


def test_infinite_node_is_capped():
    d = BoxDomain((-1.0,), (1.0,), (2001,))
    f = sample(OneDExtremalB(-2.0), d)
    # int_0^1 x^(-1/2) dx = 2; the cap loses at most sqrt(h) near 0
    h = d.spacing[0]
    v = integrate(f).value
    assert abs(v - 2.0) <= 2 * math.sqrt(h)
    assert cell_values(f)[1000] == f.values[1001]


def test_adjacent_infinite_nodes_rejected():
    d = BoxDomain.centered(1.0, 5)
    with pytest.raises(ValueError):
        integrate(GridFunction(d, [0.0, np.inf, np.inf, 1.0, 0.0]))
    d2 = BoxDomain.centered(1.0, 5, 2)
    vals = np.ones((5, 5))
    vals[1, 1] = vals[2, 2] = np.inf
    with pytest.raises(ValueError):
        integrate(GridFunction(d2, vals))


def test_tail_reported():
    f = sample(AbsExp(1), BoxDomain.centered(3.0, 301))
    assert integrate(f).tail > 0
    assert integrate(sample(SimplexIndicator.unit(2), BoxDomain.cube(-0.5, 1.5, 9, 2))).tail == 0.0


def test_exact_for_exponential_of_affine():
    d = BoxDomain((0.0,), (2.0,), (9,))
    f = GridFunction.from_neglog(d, 0.7 * d.axis(0))
    h = d.spacing[0]
    exact = sum(math.exp(-0.7 * (i + 0.5) * h) * h for i in range(8))
    assert integrate(f).value == pytest.approx(exact, rel=1e-14)


grid = BoxDomain.centered(6.0, 97)


@given(a=st.floats(0.1, 10.0), b=st.floats(0.1, 10.0), s1=st.integers(0, 1000), s2=st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_linear_on_shared_support(a, b, s1, s2):
    # cell values are geometric means, so linearity holds for proportional functions
    f = generate_random_logconcave(s1, 1, 3, grid)
    g = f.scaled(b / a)
    lhs = integrate(GridFunction(grid, a * f.values + b * g.values)).value
    rhs = a * integrate(f).value + b * integrate(g).value
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(s=st.integers(0, 1000), w=st.floats(0.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_monotone(s, w):
    f = generate_random_logconcave(s, 2, 2, BoxDomain.centered(4.0, 33, 2))
    g = f.with_values(f.values * (1 + w))
    assert integrate(f).value <= integrate(g).value


@pytest.mark.parametrize(
    "f",
    [
        sample(AbsExp(1), BoxDomain.centered(12.0, 481)),
        sample(Gaussian((0.3, 0.1)), BoxDomain.centered(5.0, 101, 2)),
        sample(OrthantExp(2), BoxDomain.cube(-1.0, 15.0, 129, 2)),
        sample(SimplexIndicator.unit(3), BoxDomain.cube(-0.25, 1.25, 25, 3)),
    ],
    ids=["abs-1d", "gauss-2d", "orthant-2d", "simplex-3d"],
)
def test_layer_cake_agrees_with_integrate(f):
    levels = default_levels(f)
    step = levels[0] / levels[1] - 1
    h = max(f.domain.spacing)
    perimeter = 2 * sum(f.domain.volume / (b - a) for a, b in zip(f.domain.lower, f.domain.upper))
    total = integrate(f).value
    assert abs(layer_cake(f, levels) - total) <= (step + h * perimeter) * total
