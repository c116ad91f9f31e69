"""Times the series-multiplication kernel: compiled vs pure Python.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Also times one end-to-end height with each backend (each in a fresh
interpreter, since the backend is fixed at import)."""

import argparse
import os
import random
import subprocess
import sys
import timeit

from padic_heights._core import pykernel

HEIGHT = """
from padic_heights.curve import AntisymDivisor
from padic_heights.heights import HeightContext, height_antisym
ctx = HeightContext.build([0, 40, 18, -23, 0, 1], 11, 5, use_cache=False)
C = ctx.C
height_antisym(AntisymDivisor([(C.point(-4, 24), 1)]), AntisymDivisor([(C.point(5, 30), 1)]), ctx)
"""


def kernel_rows(repeat: int):
    try:
        from padic_heights._core import ckernel
    except ImportError:
        ckernel = None
    rng = random.Random(0)
    mod = 11 ** 12
    print(f"{'length':>8} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for length in (16, 64, 256, 1024):
        a = [rng.randrange(mod) for _ in range(length)]
        b = [rng.randrange(mod) for _ in range(length)]
        number = max(1, 2000 // length)
        py = min(timeit.repeat(lambda: pykernel.conv_mod(a, b, mod), number=number,
                               repeat=repeat)) / number
        if ckernel is None:
            print(f"{length:>8} {py * 1e3:>10.3f} {'n/a':>10} {'':>8}")
            continue
        assert ckernel.conv_mod(a, b, mod) == pykernel.conv_mod(a, b, mod)
        cy = min(timeit.repeat(lambda: ckernel.conv_mod(a, b, mod), number=number,
                               repeat=repeat)) / number
        print(f"{length:>8} {py * 1e3:>10.3f} {cy * 1e3:>10.3f} {py / cy:>7.1f}x")


def height_rows():
    for label, pure in (("cython", "0"), ("python", "1")):
        env = dict(os.environ, PADIC_HEIGHTS_PURE=pure)
        code = ("import time; t = time.perf_counter()\n" + HEIGHT
                + "from padic_heights.kernels import BACKEND\n"
                  "print(BACKEND, round(time.perf_counter() - t, 2))")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"genus-2 height, requested {label}: backend {out[0]}, {out[1]} s")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    kernel_rows(args.repeat)
    height_rows()


if __name__ == "__main__":
    main()
