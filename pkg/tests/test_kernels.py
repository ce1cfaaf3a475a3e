import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrperc import _kernels_py, kernels
from lrperc.params import BoxSpec, make_params, sample_weights

try:
    from lrperc import _kernels

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels unavailable")


def _setup(d, side, seed, beta=2.0):
    box = BoxSpec.corner((0,) * d, side)
    wf = sample_weights(box, beta, seed)
    return box.coords(), wf.weights


def test_pair_count():
    assert kernels.pair_count(5) == 10
    assert kernels.pair_count(1) == 0


@needs_compiled
@pytest.mark.parametrize("d,side", [(1, 400), (2, 20), (3, 7)])
def test_backends_sample_identical_edges(d, side):
    coords, w = _setup(d, side, seed=17 + d)
    for rmax in (-1.0, 3.0):
        ic, jc = _kernels.sample_edges(coords, w, 0.8, 1.5, 99, rmax)
        ip, jp = _kernels_py.sample_edges(coords, w, 0.8, 1.5, 99, rmax)
        assert np.array_equal(ic, ip) and np.array_equal(jc, jp)


@needs_compiled
def test_backends_phi_equivalent():
    coords, w = _setup(1, 300, seed=5)
    ic, jc, pc = _kernels.sample_phi_edges(coords, w, 1.5, 42, 2.0, -1.0)
    ip, jp, pp = _kernels_py.sample_phi_edges(coords, w, 1.5, 42, 2.0, -1.0)
    assert np.array_equal(ic, ip) and np.array_equal(jc, jp)
    # log evaluations may differ in the last ulp between libm and numpy
    np.testing.assert_allclose(pc, pp, rtol=1e-12)


@needs_compiled
def test_backends_union_find_identical():
    rng = np.random.default_rng(3)
    n = 200
    ei = rng.integers(0, n, 300)
    ej = rng.integers(0, n, 300)
    keep = ei != ej
    ei, ej = np.minimum(ei, ej)[keep], np.maximum(ei, ej)[keep]
    a = _kernels.union_find(n, ei.astype(np.int64), ej.astype(np.int64))
    b = _kernels_py.union_find(n, ei.astype(np.int64), ej.astype(np.int64))
    assert np.array_equal(a, b)


def test_truncated_is_subset_of_exact():
    coords, w = _setup(1, 500, seed=11)
    ei, ej = kernels.sample_edges(coords, w, 1.0, 1.5, 7, -1.0)
    ti, tj = kernels.sample_edges(coords, w, 1.0, 1.5, 7, 10.0)
    exact = set(zip(ei.tolist(), ej.tolist()))
    trunc = set(zip(ti.tolist(), tj.tolist()))
    assert trunc <= exact
    assert all(abs(coords[i, 0] - coords[j, 0]) <= 10 for i, j in trunc)
    # the removed edges are exactly the long ones
    assert all(abs(coords[i, 0] - coords[j, 0]) > 10 for i, j in exact - trunc)


def test_edges_deterministic_in_seed():
    coords, w = _setup(1, 200, seed=2)
    a = kernels.sample_edges(coords, w, 0.5, 1.5, 13, -1.0)
    b = kernels.sample_edges(coords, w, 0.5, 1.5, 13, -1.0)
    c = kernels.sample_edges(coords, w, 0.5, 1.5, 14, -1.0)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert len(a[0]) != len(c[0]) or not np.array_equal(a[0], c[0])


def _uf_oracle(n, ei, ej):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(zip(ei.tolist(), ej.tolist()))
    labels = np.arange(n)
    for comp in nx.connected_components(g):
        labels[list(comp)] = min(comp)
    return labels


@given(
    st.integers(2, 30),
    st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=60),
)
@settings(max_examples=80, deadline=None)
def test_union_find_matches_graph_oracle(n, raw_edges):
    edges = [(min(a, b), max(a, b)) for a, b in raw_edges if a != b and max(a, b) < n]
    ei = np.array([e[0] for e in edges], dtype=np.int64)
    ej = np.array([e[1] for e in edges], dtype=np.int64)
    got = kernels.union_find(n, ei, ej)
    assert np.array_equal(got, _uf_oracle(n, ei, ej))


def test_union_find_labels_are_component_minima():
    ei = np.array([0, 5, 2], dtype=np.int64)
    ej = np.array([3, 6, 3], dtype=np.int64)
    labels = kernels.union_find(8, ei, ej)
    assert labels.tolist() == [0, 1, 0, 0, 4, 5, 5, 7]
