"""Transport along characteristics of g and how derivatives of the flow grow.

Run with ``python demos/05_characteristics.py``.
"""

from __future__ import annotations

import math

from fracmat import CharacteristicSemigroup, catalog, classify_growth

g = catalog("power-beta", beta=0.5, a=0.0, b=math.inf)
C = CharacteristicSemigroup(g, direction=-1)
for t in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5):
    x = C.flow(t, 4.0)
    print(f"t={t:3}: X_4(t) = {x}")
print("killed at t =", C.kill_time(4.0))

square = lambda x: x * x  # noqa: E731
print("(T(1) f)(4) for f = x^2:", C.apply(1.0, square, 4.0))

for beta in (2.0, 0.5):
    gc = classify_growth(catalog("neg-power-beta", beta=beta), (1.0, 10.0))
    print(f"beta={beta}: {gc.regime}, p={gc.p:.3f}")
