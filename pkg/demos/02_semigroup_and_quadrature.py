"""The semigroup e^{-tA} and fractional powers recovered from it by quadrature.

Run with ``python demos/02_semigroup_and_quadrature.py``.
"""

from __future__ import annotations

import numpy as np

from fracmat import (
    MatrixSemigroup,
    TwoBandMatrix,
    frac_power_bf01,
    frac_power_bf02,
    neg_power_bf03,
    real_power,
)

A = TwoBandMatrix([1.0, 2.0, 3.0])
S = MatrixSemigroup(A)
print("strategy:", S.strategy)
for t in (0.1, 1.0, 5.0):
    row = S.at(t).data[0]
    print(f"t={t:4}: first row of e^(-tA) = {np.array2string(row, precision=6)}")

# -tA generator check: (e^{-tA} - I) / t -> -A
print("generator error at t=1e-6:", np.max(np.abs(S.deviation(1e-6) / 1e-6 + A.dense())))

for alpha in (0.25, 0.5, 0.75):
    P = frac_power_bf01(S, alpha)
    err = np.max(np.abs(P.data - real_power(A, alpha).data))
    print(f"order {alpha}: quadrature vs closed form, max error {err:.2e}")

print("order 1.5, higher-difference integral:",
      f"{np.max(np.abs(frac_power_bf02(A, 1.5).data - real_power(A, 1.5).data)):.2e}")
print("order -0.5, resolvent-free integral:",
      f"{np.max(np.abs(neg_power_bf03(A, 0.5).data - real_power(A, -0.5).data)):.2e}")
