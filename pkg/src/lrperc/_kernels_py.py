"""Pure numpy implementation of the pair-sampling and labeling kernels.

Selected at import time when the compiled extension is unavailable (or
when ``LRPERC_BACKEND=python`` is set).  Pairs (i, j), i < j, are
enumerated row by row in the same order as the compiled kernel's double
loop; the flat pair index doubles as the RNG counter, so both backends
see identical uniforms and produce identical edge sets.
"""

import numpy as np

from .rng import TAG_EDGE, stream_key, uniform01_array

BACKEND_NAME = "python"

# table of (rsq)^(alpha/2) by squared distance; skipped above this size
_RSQ_TABLE_CAP = 1 << 24


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def _dist_power_table(coords, alpha):
    """Lookup tables for r^alpha: by |dx| when d=1, by r^2 for small d>=2."""
    d = coords.shape[1]
    span = int((coords.max(axis=0) - coords.min(axis=0)).max())
    if d == 1:
        dx = np.arange(span + 1, dtype=np.float64)
        return "dx", (dx * dx) ** (0.5 * alpha)
    rsq_max = int(((coords.max(axis=0) - coords.min(axis=0)) ** 2).sum())
    if rsq_max + 1 <= _RSQ_TABLE_CAP:
        rsq = np.arange(rsq_max + 1, dtype=np.float64)
        return "rsq", rsq ** (0.5 * alpha)
    return "none", None


def _row_iter(coords, weights, seed, alpha, rmax):
    """Yield per-row (k, j, u, rpow, wprod) for candidate pairs (i, i+1..n-1)."""
    n = coords.shape[0]
    key = stream_key(seed, TAG_EDGE)
    kind, table = _dist_power_table(coords, alpha)
    rsq_max = rmax * rmax if rmax >= 0 else None
    rowstart = 0
    for i in range(n - 1):
        nj = n - i - 1
        k = np.arange(rowstart, rowstart + nj, dtype=np.uint64)
        rowstart += nj
        diff = coords[i + 1 :] - coords[i]
        if kind == "dx":
            rsq_or_dx = np.abs(diff[:, 0])
            rsq = rsq_or_dx * rsq_or_dx
        else:
            rsq = np.einsum("ij,ij->i", diff, diff)
            rsq_or_dx = rsq
        if rsq_max is not None:
            keep = rsq.astype(np.float64) <= rsq_max
            if not keep.any():
                continue
            k = k[keep]
            rsq_or_dx = rsq_or_dx[keep]
            j = np.nonzero(keep)[0] + i + 1
            wj = weights[i + 1 :][keep]
        else:
            j = np.arange(i + 1, n, dtype=np.int64)
            wj = weights[i + 1 :]
        u = uniform01_array(key, k)
        if table is not None:
            rpow = table[rsq_or_dx]
        else:
            rpow = rsq_or_dx.astype(np.float64) ** (0.5 * alpha)
        yield i, j, u, rpow, weights[i] * wj


def sample_edges(coords, weights, lam, alpha, seed, rmax=-1.0):
    """Occupied pairs under intensity ``lam``; returns (i, j) index arrays.

    A pair is occupied iff its coupled exponential -ln(u) r^a/(wi wj)
    falls below lam, which matches the closed-form edge probability.
    """
    out_i, out_j = [], []
    if lam > 0:
        for i, j, u, rpow, wprod in _row_iter(coords, weights, seed, alpha, rmax):
            rate = lam * wprod / rpow
            cand = (1.0 - u) < rate  # cheap reject: u <= 1-rate implies vacant
            if cand.any():
                idx = np.nonzero(cand)[0]
                occ = idx[u[idx] > np.exp(-rate[idx])]
                if len(occ):
                    out_j.append(j[occ])
                    out_i.append(np.full(len(occ), i, dtype=np.int64))
    if not out_i:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy()
    return np.concatenate(out_i), np.concatenate(out_j)


def sample_phi_edges(coords, weights, alpha, seed, ell_max, rmax=-1.0):
    """Pairs whose coupled exponential is below ell_max, with its value."""
    out_i, out_j, out_phi = [], [], []
    if ell_max > 0:
        for i, j, u, rpow, wprod in _row_iter(coords, weights, seed, alpha, rmax):
            rate = ell_max * wprod / rpow
            cand = (1.0 - u) < rate
            if cand.any():
                idx = np.nonzero(cand)[0]
                keep = idx[u[idx] > np.exp(-rate[idx])]
                if len(keep):
                    phi = -np.log(u[keep]) * rpow[keep] / wprod[keep]
                    out_j.append(j[keep])
                    out_i.append(np.full(len(keep), i, dtype=np.int64))
                    out_phi.append(phi)
    if not out_i:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0, dtype=np.float64)
    return np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_phi)


def union_find(n, ei, ej):
    """Connected-component labels; label = smallest vertex of the component."""
    parent = np.arange(n, dtype=np.int64)

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:  # path compression
            parent[v], v = root, parent[v]
        return root

    for a, b in zip(ei.tolist(), ej.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:  # keep the smaller index as root
                parent[rb] = ra
            else:
                parent[ra] = rb
    labels = np.empty(n, dtype=np.int64)
    for v in range(n):
        labels[v] = find(v)
    return labels
