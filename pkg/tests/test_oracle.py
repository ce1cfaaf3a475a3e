import math

import numpy as np
import pytest

from lrperc.edges import edge_probability
from lrperc.oracle import (
    PAIR_CAP,
    TinyInstance,
    exact_component_size_law,
    exact_connection_prob,
    exact_event_prob,
    oracle_vs_mc,
    standard_suite,
)
from lrperc.params import BoxSpec, ModelParams


def _unit_path3(lam=1.0, alpha=2.0):
    return TinyInstance(
        box=BoxSpec.corner((0,), 3),
        params=ModelParams(1, alpha, 2.0, lam),
        weights=np.ones(3),
        name="t",
    )


def test_three_vertex_connection_closed_form():
    inst = _unit_path3()
    got = exact_connection_prob(inst, (0,), (2,))
    p1 = 1.0 - math.exp(-1.0)        # distance-1 pairs
    p2 = 1.0 - math.exp(-0.25)       # the distance-2 pair
    expected = p2 + (1.0 - p2) * p1 * p1
    assert math.isclose(got, expected, rel_tol=1e-14)
    # frozen reference value, recomputed independently by hand
    assert math.isclose(got, 0.532389630841484, rel_tol=1e-12)


def test_two_vertices_equal_edge_probability():
    box = BoxSpec.corner((0,), 2)
    params = ModelParams(1, 1.7, 2.0, 0.9)
    inst = TinyInstance(box=box, params=params, weights=np.array([1.5, 2.5]))
    assert math.isclose(
        exact_connection_prob(inst, (0,), (1,)),
        edge_probability(params, 1.5, 2.5, 1.0),
        rel_tol=1e-14,
    )


def test_lambda_zero_disconnects():
    inst = _unit_path3(lam=0.0)
    assert exact_connection_prob(inst, (0,), (2,)) == 0.0
    law = exact_component_size_law(inst, (1,))
    assert law == {1: 1.0}


def test_same_vertex_connected():
    assert exact_connection_prob(_unit_path3(), (1,), (1,)) == 1.0


def test_component_law_normalizes_and_mean_identity():
    inst = TinyInstance(
        box=BoxSpec.corner((0,), 4),
        params=ModelParams(1, 1.5, 2.0, 0.5),
        weights=np.array([1.0, 2.0, 1.5, 3.0]),
    )
    law = exact_component_size_law(inst, (0,))
    assert abs(math.fsum(law.values()) - 1.0) < 1e-12
    mean = sum(k * v for k, v in law.items())
    # E|C(x)| = sum_y P[x <-> y]
    pair_sum = sum(
        exact_connection_prob(inst, (0,), (y,)) for y in range(4)
    )
    assert math.isclose(mean, pair_sum, rel_tol=1e-12)


def test_pair_cap_enforced():
    with pytest.raises(ValueError):
        TinyInstance(
            box=BoxSpec.corner((0,), 8),  # 28 pairs > 20
            params=ModelParams(1, 2.0, 2.0, 1.0),
            weights=np.ones(8),
        )


def test_weights_below_one_rejected():
    with pytest.raises(ValueError):
        TinyInstance(
            box=BoxSpec.corner((0,), 2),
            params=ModelParams(1, 2.0, 2.0, 1.0),
            weights=np.array([0.5, 1.0]),
        )


def test_unknown_target_rejected():
    with pytest.raises(ValueError):
        exact_event_prob(_unit_path3(), ("nonsense",))


def test_suite_has_enough_instances():
    suite = standard_suite()
    assert len(suite) >= 10
    kinds = {target[0] for _, target in suite}
    assert {"connection", "component_law", "theta_boundary_reach", "psi0"} <= kinds


def test_oracle_vs_mc_moderate_replicates():
    for idx, (inst, target) in enumerate(standard_suite()):
        rep = oracle_vs_mc(inst, target, mc_replicates=4000, seed=777 + idx)
        assert abs(rep.z) <= 4.5, (inst.name, target, rep)


def test_oracle_vs_mc_deterministic_case():
    inst = _unit_path3(lam=0.0)
    rep = oracle_vs_mc(inst, ("connection", (0,), (2,)), mc_replicates=100, seed=1)
    assert rep.exact == 0.0 and rep.mc == 0.0 and rep.z == 0.0
