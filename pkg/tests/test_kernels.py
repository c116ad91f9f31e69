import random

import pytest

from padic_heights import kernels
from padic_heights._core import pykernel

try:
    from padic_heights._core import ckernel
except ImportError:  # extension not built
    ckernel = None


def schoolbook(a, b, mod, n):
    out = [0] * n
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < n:
                out[i + j] = (out[i + j] + x * y) % mod
    return out


CASES = [(11 ** 5, 3, 4), (11 ** 10, 40, 37), (13 ** 17, 90, 120), (11 ** 30, 25, 25),
         (7, 1, 1)]


@pytest.mark.parametrize("mod,la,lb", CASES)
def test_python_kernel_matches_schoolbook(mod, la, lb):
    rng = random.Random(mod + la)
    a = [rng.randrange(mod) for _ in range(la)]
    b = [rng.randrange(mod) for _ in range(lb)]
    for n in (None, 1, la, la + lb + 3):
        want = schoolbook(a, b, mod, n if n is not None else la + lb - 1)
        assert pykernel.conv_mod(a, b, mod, n) == want


@pytest.mark.skipif(ckernel is None, reason="compiled kernel not built")
@pytest.mark.parametrize("mod,la,lb", CASES)
def test_compiled_kernel_matches_python(mod, la, lb):
    rng = random.Random(mod * 3 + lb)
    a = [rng.randrange(mod) for _ in range(la)]
    b = [rng.randrange(mod) for _ in range(lb)]
    for n in (None, 2, lb, la + lb + 3):
        assert ckernel.conv_mod(a, b, mod, n) == pykernel.conv_mod(a, b, mod, n)


def test_empty_inputs():
    assert pykernel.conv_mod([], [1], 7, 3) == [0, 0, 0]
    assert kernels.conv_mod([], [1], 7) == []


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    if ckernel is not None:
        assert kernels.BACKEND == "cython" or kernels.conv_mod is pykernel.conv_mod


def test_pure_python_fallback_is_selectable():
    import os
    import subprocess
    import sys

    env = dict(os.environ, PADIC_HEIGHTS_PURE="1")
    out = subprocess.run([sys.executable, "-c",
                          "from padic_heights import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
