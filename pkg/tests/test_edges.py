import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from lrperc.edges import (
    calibrate_tail_bound,
    edge_probability,
    open_edges_at,
    pair_connection_expectation,
    phi_from_uniform,
    sample_coupled_field,
    sample_graph,
    tail_edge_bound,
    truncation_error_bound,
)
from lrperc.params import BoxSpec, make_params, sample_weights
from lrperc.rng import substream


@given(
    st.floats(0.01, 10.0),   # lam
    st.floats(0.2, 4.0),     # alpha
    st.floats(1.0, 50.0),    # w_x
    st.floats(1.0, 50.0),    # w_y
    st.floats(0.5, 100.0),   # r
)
@settings(max_examples=200)
def test_edge_probability_closed_form_and_dominance(lam, alpha, wx, wy, r):
    p = edge_probability(make_params(1, alpha, 1.0, lam), wx, wy, r)
    direct = 1.0 - math.exp(-lam * wx * wy / r**alpha)
    assert abs(p - direct) < 1e-12
    assert 0.0 <= p <= 1.0  # rounds to exactly 1 for huge rates
    # unit-weight lower bound; allow one ulp from the expm1 evaluation
    assert p >= (1.0 - math.exp(-lam * r**-alpha)) - 1e-15


def test_edge_probability_validation():
    p = make_params(1, 1.5, 2.0, 1.0)
    with pytest.raises(ValueError):
        edge_probability(p, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        edge_probability(p, 0.5, 1.0, 1.0)


def test_phi_slice_matches_bernoulli_law():
    """phi < lam has the same probability as the direct edge law."""
    lam, alpha, wx, wy, r = 0.7, 1.5, 2.0, 3.0, 4.0
    p = edge_probability(make_params(1, alpha, 1.0, lam), wx, wy, r)
    n = 200000
    u = (np.arange(n) + 0.5) / n  # stratified uniforms: deterministic check
    phi = -np.log(u) * r**alpha / (wx * wy)
    freq = float((phi < lam).mean())
    assert abs(freq - p) < 3.0 * math.sqrt(p * (1 - p) / n) + 1.0 / n


def test_phi_from_uniform_validation():
    with pytest.raises(ValueError):
        phi_from_uniform(0.0, 1.0, 1.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        phi_from_uniform(0.5, 1.0, 1.0, 0.0, 1.5)


def _field(radius=40, seed=3, lam_max=2.0, d=1, alpha=1.5, beta=2.0):
    box = BoxSpec.centered_at((0,) * d, radius)
    params = make_params(d, alpha, beta, 1.0)
    return sample_coupled_field(
        box, params, lam_max,
        weights_seed=substream(seed, 1), edge_seed=substream(seed, 2),
    )


def test_open_edges_nested():
    fld = _field()
    prev = set()
    for ell in (0.1, 0.2, 0.5, 1.0, 2.0):
        cur = open_edges_at(fld, ell).pairs()
        assert prev <= cur
        prev = cur
    with pytest.raises(ValueError):
        open_edges_at(fld, 3.0)  # beyond materialized ell_max


def test_coupled_slice_equals_direct_sampler():
    """The lam-slice of the coupling is the exact sampler's edge set."""
    box = BoxSpec.centered_at((0,), 50)
    params = make_params(1, 1.5, 2.0, 0.6)
    ws, es = substream(9, 1), substream(9, 2)
    fld = sample_coupled_field(box, params, 0.6 * (1 + 1e-12), ws, es)
    wf = sample_weights(box, params.beta, ws)
    direct = sample_graph(box, wf, params, seed=es)
    assert open_edges_at(fld, 0.6).pairs() == direct.pairs()


def test_phi_at_matches_materialized():
    fld = _field(radius=10)
    for i, j, phi in zip(fld.i[:20], fld.j[:20], fld.phi[:20]):
        x, y = fld.box.vertex(int(i)), fld.box.vertex(int(j))
        assert math.isclose(fld.phi_at(x, y), float(phi), rel_tol=1e-12)


def test_weight_dominance_under_shared_uniforms():
    """Pointwise larger weights keep every occupied edge (same uniforms)."""
    box = BoxSpec.corner((0,), 150)
    params = make_params(1, 1.5, 2.0, 0.5)
    fld = sample_coupled_field(box, params, 10.0, substream(4, 1), substream(4, 2))
    small = open_edges_at(fld, 0.5).pairs()
    # doubling all weights divides every phi by 4 => phi/4 < 0.5 iff phi < 2
    big = open_edges_at(fld, 2.0).pairs()
    assert small <= big


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.7, 3.0])
def test_pair_connection_expectation_vs_quadrature(beta):
    # the closed form implements (1/u)(1 + int_1^u v^-beta (1 + beta ln v) dv);
    # check the antiderivative against numeric quadrature of that integrand
    for u in (1.5, 2.0, 7.3, 120.0):
        closed = pair_connection_expectation(u, beta)
        val, err = integrate.quad(lambda v: v**-beta * (1 + beta * math.log(v)), 1, u)
        assert abs(closed - (1.0 + val) / u) < 1e-9 + 10 * err
    assert pair_connection_expectation(0.5, beta) == 1.0
    assert pair_connection_expectation(1.0, beta) == 1.0


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.7, 3.0])
def test_pair_connection_expectation_vs_monte_carlo(beta):
    # independent check of the whole E[min(W1 W2/u, 1)] reduction
    rng = np.random.default_rng(int(beta * 100))
    n = 400000
    w1 = rng.random(n) ** (-1.0 / beta)
    w2 = rng.random(n) ** (-1.0 / beta)
    for u in (2.0, 10.0):
        sample = np.minimum(w1 * w2 / u, 1.0)
        err = 4.0 * sample.std() / math.sqrt(n)
        assert abs(pair_connection_expectation(u, beta) - sample.mean()) < err


def test_truncation_bound_monotone_and_additive():
    box = BoxSpec.corner((0,), 120)
    params = make_params(1, 1.5, 2.0, 0.8)
    radii = [5.0, 10.0, 20.0, 50.0]
    bounds = [truncation_error_bound(box, params, r) for r in radii]
    assert all(b1 >= b2 for b1, b2 in zip(bounds, bounds[1:]))
    # additivity over disjoint shells: E[missed > 5] - E[missed > 20]
    # equals the shell sum computed from a full-distance enumeration
    shell = bounds[0] - bounds[2]
    assert shell >= 0
    # lam = 0 is exactly 0
    assert truncation_error_bound(box, params.with_lambda(0.0), 5.0) == 0.0


def test_truncated_mode_reports_bound():
    box = BoxSpec.corner((0,), 100)
    params = make_params(1, 1.5, 2.0, 0.8)
    wf = sample_weights(box, params.beta, 21)
    el = sample_graph(box, wf, params, seed=22, mode="truncated", radius=8.0)
    assert el.truncation_radius == 8.0
    assert el.truncation_error_bound == truncation_error_bound(box, params, 8.0)
    assert (el.lengths_sq() <= 64).all()
    exact = sample_graph(box, wf, params, seed=22)
    assert exact.truncation_error_bound is None
    assert el.pairs() <= exact.pairs()


def test_truncation_bound_dominates_observed_misses():
    """The union bound exceeds the mean number of truncated-away edges."""
    box = BoxSpec.corner((0,), 80)
    params = make_params(1, 1.5, 2.0, 0.5)
    radius = 10.0
    bound = truncation_error_bound(box, params, radius)
    missed = 0
    reps = 200
    for rep in range(reps):
        wf = sample_weights(box, params.beta, substream(31, rep, 1))
        exact = sample_graph(box, wf, params, seed=substream(31, rep, 2))
        trunc = sample_graph(
            box, wf, params, seed=substream(31, rep, 2), mode="truncated", radius=radius
        )
        missed += exact.n_edges - trunc.n_edges
    mean_missed = missed / reps
    sigma = math.sqrt(max(mean_missed, 1.0) / reps)
    assert mean_missed <= bound + 4 * sigma


def test_tail_bound_calibration():
    params = make_params(1, 1.5, 2.0, 1.0)
    tb = calibrate_tail_bound(params, s=50, t0=5.0)
    box = BoxSpec.corner((0,), 50)
    exact_at_t0 = truncation_error_bound(box, params, 5.0)
    assert math.isclose(
        tail_edge_bound(50, 5.0, tb, params), min(1.0, exact_at_t0), rel_tol=1e-12
    )
    # bound decays in t beyond the anchor
    assert tail_edge_bound(50, 50.0, tb, params) <= tail_edge_bound(50, 5.0, tb, params)
    with pytest.raises(ValueError):
        tail_edge_bound(50, 1.0, tb, params)  # t below t0


def test_calibrate_rejects_trivial_tail():
    with pytest.raises(ValueError):
        calibrate_tail_bound(make_params(1, 1.5, 0.5, 1.0), s=10, t0=2.0)
