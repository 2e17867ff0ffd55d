"""Grunwald-Letnikov sums on both sides and their first-order convergence.

Run with ``python demos/03_grunwald_letnikov.py``.
"""

from __future__ import annotations

import math

from fracmat import FunctionSpec, Grid, fit_slope, gl_left, gl_right

f = FunctionSpec.from_string("x", 0, 1)
exact = 2 / math.sqrt(math.pi)  # half-derivative of x at 1

ns = [64, 128, 256, 512, 1024, 2048]
errs = []
for n in ns:
    v = gl_left(f, Grid(0.0, 1.0, n), 0.5).value
    errs.append(abs(v - exact))
    print(f"n={n:5d}  value={v:.10f}  error={errs[-1]:.3e}")
slope, _ = fit_slope([1 / n for n in ns], errs)
print(f"observed order {slope:.3f}")

# right-sided sums carry a complex phase for non-integer order
r = gl_right(FunctionSpec.from_string("1-x", 0, 1), Grid(0.0, 1.0, 1024), 0.5)
print("right half-derivative of 1-x at 0:", r.value, " vs i/Gamma(3/2) =", 1j / math.gamma(1.5))
