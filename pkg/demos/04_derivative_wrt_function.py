"""Fractional derivatives with respect to g(x), checked against quadrature.

Run with ``python demos/04_derivative_wrt_function.py``.
"""

from __future__ import annotations

from fracmat import FunctionSpec, Grid, SampleVector, frac_deriv_wrt, rl_wrt_quadrature, run_sweep
from fracmat.convergence import wrt_plan

f = FunctionSpec.from_string("x^2", 0, 1)
g = FunctionSpec.from_string("x^1.5", 0, 1)

ref = rl_wrt_quadrature(f, g, 1.0, 0.5, tol=1e-10)
print(f"quadrature reference at x=1: {ref:.12f}")
for method, n in (("matrix-power", 512), ("balakrishnan", 32)):
    r = frac_deriv_wrt(f, g, Grid(0.0, 1.0, n), 0.5, method=method)
    print(f"{method:12s} n={n:3d}: {r.value:.8f}  (route {r.method})")

# composing two half-integrals gives one full integral of f with respect to g
grid = Grid(0.0, 1.0, 256)
half = frac_deriv_wrt(f, g, grid, -0.5)
twice = frac_deriv_wrt(SampleVector(half.per_node), g, grid, -0.5)
print(f"I^(1/2) I^(1/2) f = {twice.value:.8f},  I^1 f = {frac_deriv_wrt(f, g, grid, -1.0).value:.8f}")

rep = run_sweep(wrt_plan(f, g, 0.5))
print(f"sweep n={rep.sizes[0]}..{rep.sizes[-1]}: slope {rep.slope:.3f}, predicted {rep.predicted}")
