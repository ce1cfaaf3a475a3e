"""Backend selection for the hot kernels.

The compiled extension is preferred; the numpy fallback is used when the
extension is missing or when ``LRPERC_BACKEND=python`` is set.  Both
expose the same functions and produce the same edge sets for the same
seeds, so everything above this module is backend-agnostic.
"""

import os

from . import _kernels_py

if os.environ.get("LRPERC_BACKEND", "").lower() == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME

pair_count = _impl.pair_count
sample_edges = _impl.sample_edges
sample_phi_edges = _impl.sample_phi_edges
union_find = _impl.union_find
