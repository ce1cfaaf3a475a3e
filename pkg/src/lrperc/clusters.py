"""Connected-component machinery on sampled edge sets."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .edges import EdgeList
from .params import BoxSpec

__all__ = [
    "ClusterLabels",
    "DenseSetReport",
    "components",
    "largest_component",
    "component_within",
    "dense_vertices",
    "boxes_attached",
]


@dataclass(frozen=True)
class ClusterLabels:
    """Partition of a box's vertices; each label is its component's smallest vertex."""

    box: BoxSpec
    labels: np.ndarray = field(repr=False)

    def component_of(self, index: int) -> np.ndarray:
        return np.nonzero(self.labels == self.labels[index])[0]

    def sizes(self) -> dict:
        roots, counts = np.unique(self.labels, return_counts=True)
        return dict(zip(roots.tolist(), counts.tolist()))


def components(box: BoxSpec, edge_list: EdgeList) -> ClusterLabels:
    """Union-find labeling of the box under the occupied edges."""
    n = box.n_vertices
    if edge_list.n_edges and (
        edge_list.i.min() < 0
        or edge_list.j.max() >= n
        or edge_list.box.n_vertices != n
    ):
        raise ValueError("edge endpoints outside box")
    labels = kernels.union_find(n, edge_list.i, edge_list.j)
    return ClusterLabels(box=box, labels=labels)


def largest_component(labels: ClusterLabels):
    """(vertex index array, size) of the largest component.

    Ties go to the component with the smallest root vertex, which is a
    fixed deterministic rule because labels are canonical minima.
    """
    roots, counts = np.unique(labels.labels, return_counts=True)
    best = counts.max()
    winner = roots[counts == best].min()
    members = np.nonzero(labels.labels == winner)[0]
    return members, int(best)


def _restrict_edges(edge_list: EdgeList, coords: np.ndarray, sub: BoxSpec):
    """Edges of ``edge_list`` with both endpoints inside ``sub``."""
    lo = np.asarray(sub.origin, dtype=np.int64)
    ci, cj = coords[edge_list.i], coords[edge_list.j]
    inside_i = ((ci >= lo) & (ci < lo + sub.side)).all(axis=1)
    inside_j = ((cj >= lo) & (cj < lo + sub.side)).all(axis=1)
    keep = inside_i & inside_j
    return edge_list.i[keep], edge_list.j[keep]


def component_within(x, ell: int, edge_field: EdgeList) -> np.ndarray:
    """Vertices of x + [-ell, ell]^d connected to x inside that sub-box.

    Connectivity is recomputed on the restricted edge set: a path that
    leaves the sub-box does not count.  Returns indices into the
    edge field's box; always contains x.
    """
    region = edge_field.box
    sub = BoxSpec.centered_at(x, ell)
    if not region.contains_box(sub):
        raise ValueError(f"sub-box around {tuple(x)} with radius {ell} overflows the region")
    coords = region.coords()
    ei, ej = _restrict_edges(edge_field, coords, sub)
    # relabel sub-box vertices 0..(2ell+1)^d-1 through the region indices
    sub_index = -np.ones(region.n_vertices, dtype=np.int64)
    lo = np.asarray(sub.origin, dtype=np.int64)
    inside = ((coords >= lo) & (coords < lo + sub.side)).all(axis=1)
    region_ids = np.nonzero(inside)[0]
    sub_index[region_ids] = np.arange(len(region_ids))
    labels = kernels.union_find(len(region_ids), sub_index[ei], sub_index[ej])
    x_sub = sub_index[region.index_of(x)]
    return region_ids[labels == labels[x_sub]]


@dataclass(frozen=True)
class DenseSetReport:
    """Vertices of the radius-n box whose local component fills a rho fraction."""

    n: int
    ell: int
    rho: float
    dense_vertices: np.ndarray = field(repr=False)
    fraction: float


def dense_vertices(n: int, ell: int, rho: float, edge_field: EdgeList) -> DenseSetReport:
    """Scan every x in the centered radius-n box for local cluster density.

    A vertex counts as dense when its component within x + [-ell, ell]^d
    has at least rho (2 ell + 1)^d vertices.  The edge field must cover
    the centered radius n + ell box so no scan point overflows.
    """
    if not (0 < ell < n):
        raise ValueError("need 0 < ell < n")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    region = edge_field.box
    center = region.center if region.centered else tuple(
        o + (region.side - 1) // 2 for o in region.origin
    )
    inner = BoxSpec.centered_at(center, n)
    need = BoxSpec.centered_at(center, n + ell)
    if not region.contains_box(need):
        raise ValueError("edge field region too small: needs radius n + ell around center")
    threshold = rho * (2 * ell + 1) ** region.d
    dense = []
    for v in inner.coords():
        comp = component_within(tuple(v), ell, edge_field)
        if len(comp) >= threshold:
            dense.append(region.index_of(tuple(v)))
    dense = np.asarray(dense, dtype=np.int64)
    return DenseSetReport(
        n=n, ell=ell, rho=rho, dense_vertices=dense,
        fraction=len(dense) / inner.n_vertices,
    )


def boxes_attached(comp_x: np.ndarray, comp_y: np.ndarray, edge_list: EdgeList) -> bool:
    """True iff some occupied edge joins the two disjoint vertex sets."""
    sx = np.asarray(comp_x, dtype=np.int64)
    sy = np.asarray(comp_y, dtype=np.int64)
    if np.intersect1d(sx, sy).size:
        raise ValueError("vertex sets must be disjoint")
    i_in_x = np.isin(edge_list.i, sx)
    j_in_y = np.isin(edge_list.j, sy)
    i_in_y = np.isin(edge_list.i, sy)
    j_in_x = np.isin(edge_list.j, sx)
    return bool(((i_in_x & j_in_y) | (i_in_y & j_in_x)).any())
