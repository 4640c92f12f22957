"""Backend selection for the numeric kernels.

Set CMLYRICS_BACKEND=numpy to force the pure-numpy path; anything else (or
unset) uses the numba-compiled kernels when numba is importable. The chosen
module is re-exported as ``backend``.
"""

import os

from . import numpy_backend

_choice = os.environ.get("CMLYRICS_BACKEND", "numba").lower()

if _choice == "numpy":
    backend = numpy_backend
else:
    try:
        from . import numba_backend
        backend = numba_backend
    except ImportError:
        backend = numpy_backend


def backend_name():
    return backend.NAME
