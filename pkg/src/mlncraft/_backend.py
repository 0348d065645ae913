"""Kernel backend selection.

The compiled extension is used when it imports; set ``MLNCRAFT_BACKEND=python``
to force the pure-Python kernels.
"""

import os

from . import _pykernels

python_kernels = _pykernels

if os.environ.get("MLNCRAFT_BACKEND", "").lower() == "python":
    compiled_kernels = None
    kernels = _pykernels
else:
    try:
        from . import _kernels as compiled_kernels
    except ImportError:
        compiled_kernels = None
        kernels = _pykernels
    else:
        kernels = compiled_kernels

BACKEND = kernels.BACKEND
