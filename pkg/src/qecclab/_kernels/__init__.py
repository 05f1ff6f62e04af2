"""Hot loops for toric Monte Carlo decoding.

The compiled extension is used when it was built; otherwise the pure-Python
reference implementation is selected.  Set ``QECCLAB_PURE_PYTHON=1`` to force
the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("QECCLAB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

decode_toric_batch = _impl.decode_toric_batch
EXACT_FLAG = _pykernels.EXACT_FLAG

__all__ = ["BACKEND", "EXACT_FLAG", "decode_toric_batch"]
