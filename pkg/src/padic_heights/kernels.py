"""Selects the compiled convolution kernel when available.

Set ``PADIC_HEIGHTS_PURE=1`` to force the pure-Python implementation.
"""

import os

from ._core import pykernel

BACKEND = "python"
conv_mod = pykernel.conv_mod

if os.environ.get("PADIC_HEIGHTS_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._core import ckernel
    except ImportError:  # extension not built
        pass
    else:
        conv_mod = ckernel.conv_mod
        BACKEND = "cython"
