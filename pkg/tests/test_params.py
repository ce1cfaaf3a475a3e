import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lrperc.params import (
    BoxSpec,
    PhaseClass,
    classify_phase,
    make_params,
    pareto_quantile,
    sample_weights,
)


# (d, alpha, beta) -> expected class
PHASE_TABLE = [
    (1, 0.5, 1.0, PhaseClass.TRIVIAL),        # alpha <= d
    (1, 2.0, 0.4, PhaseClass.TRIVIAL),        # beta*alpha <= d
    (1, 1.5, 1.0, PhaseClass.LAMBDA_C_ZERO),  # beta*alpha < 2d
    (1, 3.0, 0.5, PhaseClass.LAMBDA_C_ZERO),
    (2, 3.0, 1.0, PhaseClass.LAMBDA_C_ZERO),
    (1, 1.5, 2.0, PhaseClass.LAMBDA_C_POSITIVE_FINITE),
    (1, 2.0, 2.0, PhaseClass.LAMBDA_C_POSITIVE_FINITE),  # alpha = 2 edge ruling
    (2, 3.0, 2.0, PhaseClass.LAMBDA_C_POSITIVE_FINITE),
    (2, 5.0, 1.0, PhaseClass.LAMBDA_C_POSITIVE_FINITE),
    (1, 3.0, 1.0, PhaseClass.LAMBDA_C_INFINITE),
    (1, 2.5, 2.0, PhaseClass.LAMBDA_C_INFINITE),
    (1, 1.0, 2.0, PhaseClass.TRIVIAL),        # min = d exactly
    (1, 1.5, 4 / 3, PhaseClass.BOUNDARY),     # beta*alpha = 2d exactly
    (2, 4.0, 1.0, PhaseClass.BOUNDARY),       # beta*alpha = 2d exactly, d=2
]


@pytest.mark.parametrize("d,alpha,beta,expected", PHASE_TABLE)
def test_phase_table(d, alpha, beta, expected):
    assert classify_phase(make_params(d, alpha, beta, 1.0)) is expected


def test_phase_independent_of_lambda():
    for lam in (0.0, 0.3, 10.0):
        assert (
            classify_phase(make_params(1, 1.5, 2.0, lam))
            is PhaseClass.LAMBDA_C_POSITIVE_FINITE
        )


def test_tau_and_delta():
    p = make_params(1, 1.5, 2.0, 1.0)
    assert p.tau == 3.0
    assert math.isclose(p.delta_exponent, math.log(2) / math.log(4 / 3))
    with pytest.raises(ValueError):
        make_params(1, 3.0, 2.0, 1.0).delta_exponent


@pytest.mark.parametrize("bad", [dict(d=0), dict(alpha=0.0), dict(beta=-1.0), dict(lam=-0.1)])
def test_param_validation(bad):
    kwargs = dict(d=1, alpha=1.5, beta=2.0, lam=1.0)
    kwargs.update(bad)
    with pytest.raises(ValueError):
        make_params(**kwargs)


@given(st.integers(1, 3), st.integers(1, 5), st.lists(st.integers(-20, 20), min_size=1, max_size=3))
@settings(max_examples=60)
def test_box_index_vertex_roundtrip(d, side, origin):
    origin = tuple((origin * d)[:d])
    box = BoxSpec.corner(origin, side)
    for idx in range(box.n_vertices):
        v = box.vertex(idx)
        assert box.contains(v)
        assert box.index_of(v) == idx


def test_box_coords_order_matches_index():
    box = BoxSpec.corner((-1, 2), 3)
    c = box.coords()
    for idx in range(box.n_vertices):
        assert tuple(c[idx]) == box.vertex(idx)


def test_centered_box():
    box = BoxSpec.centered_at((5, -3), 2)
    assert box.center == (5, -3)
    assert box.radius == 2
    assert box.side == 5
    assert box.contains((7, -1)) and not box.contains((8, -3))
    with pytest.raises(ValueError):
        BoxSpec(d=1, origin=(0,), side=4, centered=True)


def test_boundary_mask_counts():
    box = BoxSpec.centered_at((0, 0), 2)  # 5x5
    assert int(box.boundary_mask().sum()) == 25 - 9
    line = BoxSpec.centered_at((0,), 3)
    assert int(line.boundary_mask().sum()) == 2


def test_contains_box():
    outer = BoxSpec.corner((0, 0), 10)
    assert outer.contains_box(BoxSpec.corner((2, 3), 5))
    assert not outer.contains_box(BoxSpec.corner((6, 6), 5))


@given(st.floats(0.01, 0.999), st.floats(0.2, 5.0))
def test_pareto_quantile_inverts_cdf(u, beta):
    w = pareto_quantile(u, beta)
    assert w >= 1.0
    # survival P[W > w] = w^-beta equals u at the quantile
    assert math.isclose(w**-beta, u, rel_tol=1e-9)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 4.0])
def test_weight_sample_ks(beta):
    box = BoxSpec.corner((0,), 4000)
    wf = sample_weights(box, beta, seed=1000 + int(beta * 10))
    assert wf.weights.min() >= 1.0
    stat, pvalue = stats.kstest(wf.weights, lambda w: 1.0 - w**-beta)
    assert pvalue > 1e-3


def test_weights_deterministic_and_seed_sensitive():
    box = BoxSpec.corner((0,), 100)
    a = sample_weights(box, 2.0, 7).weights
    b = sample_weights(box, 2.0, 7).weights
    c = sample_weights(box, 2.0, 8).weights
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ValueError):
        a[0] = 2.0  # read-only
