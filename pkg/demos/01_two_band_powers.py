"""Natural and real powers of a two-band matrix A = diag(a) - superdiag(a[:-1]).

Run with ``python demos/01_two_band_powers.py``.
"""

from __future__ import annotations

import numpy as np

from fracmat import TwoBandMatrix, eigendecompose, natural_power, real_power, uniform_real_power

np.set_printoptions(precision=6, suppress=True)

# distinct diagonal: the closed-form eigenvectors are available
A = TwoBandMatrix([1.0, 2.0, 3.5, 5.0])
print("A =\n", A.dense())

# A^3 entrywise from complete homogeneous polynomials, compared with products
P3 = natural_power(A, 3)
print("A^3 matches the product:", np.allclose(P3.data, np.linalg.matrix_power(A.dense(), 3)))

F = eigendecompose(A)
print("V Lambda V^-1 reconstructs A:", np.allclose(F.reconstruct(), A.dense()))

R = real_power(A, 0.5)
print(f"A^(1/2) via route {R.route!r}; squares back to A: {np.allclose(R.data @ R.data, A.dense())}")

# uniform diagonal 1/h: powers are Toeplitz with binomial-type weights
U = uniform_real_power(5, 0.25, 0.5)
print("first row of (I/h - S/h)^(1/2), h = 1/4:", U.data[0])
