"""Complete homogeneous symmetric polynomials and related combinatorics.

``H_q(a_1, ..., a_m)`` is the sum of all monomials of total degree ``q`` in
the variables.  It is the entry kernel of natural powers of two-band
matrices.  Three independent evaluation routes are provided:

* :func:`hq_monomial` -- brute-force enumeration of monomials (ground truth),
* :func:`hq_recurrence` -- the recurrence
  ``H_q(a_1..a_m) = H_q(a_1..a_{m-1}) + a_m H_{q-1}(a_1..a_m)``,
* :func:`hq_sylvester` -- the rational (Sylvester) form
  ``H_q = sum_j a_j^(q+m-1) / prod_{i != j} (a_j - a_i)``, valid only for
  pairwise distinct variables.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence

import numpy as np

from fracmat.errors import DegenerateVariables

__all__ = [
    "DISTINCT_RTOL",
    "MONOMIAL_TERM_CAP",
    "binom_real",
    "distinct",
    "gaussian_binomial",
    "hq_monomial",
    "hq_recurrence",
    "hq_sylvester",
    "hq_table",
    "stirling2",
]

#: minimal pairwise separation, relative to max |a_i|, for the rational route
DISTINCT_RTOL = 1.0e-6

#: above this many monomials ``hq_monomial`` delegates to the recurrence
MONOMIAL_TERM_CAP = 10**6


def _as_vars(values: Sequence[float]) -> np.ndarray:
    a = np.asarray(values, dtype=float).ravel()
    if a.size < 1:
        raise ValueError("at least one variable is required")
    if not np.all(np.isfinite(a)):
        raise ValueError("variables must be finite")
    return a


def _check_degree(q: int) -> int:
    if int(q) != q or q < 0:
        raise ValueError(f"degree must be a non-negative integer: {q!r}")
    return int(q)


def distinct(values: Sequence[float], tol: float = DISTINCT_RTOL) -> bool:
    """Return True if ``min_{i != j} |a_i - a_j| > tol * max |a_i|``."""
    a = _as_vars(values)
    if a.size == 1:
        return True
    s = np.sort(a)
    scale = np.max(np.abs(a))
    return bool(np.min(np.diff(s)) > tol * scale)


def hq_monomial(values: Sequence[float], q: int) -> float:
    """Evaluate ``H_q`` by summing every monomial of degree ``q``.

    Enumeration costs ``C(m+q-1, q)`` products; requests above
    :data:`MONOMIAL_TERM_CAP` fall through to :func:`hq_recurrence`.
    """
    a = _as_vars(values)
    q = _check_degree(q)
    if q == 0:
        return 1.0
    if math.comb(a.size + q - 1, q) > MONOMIAL_TERM_CAP:
        return hq_recurrence(a, q)
    total = 0.0
    for idx in itertools.combinations_with_replacement(range(a.size), q):
        term = 1.0
        for i in idx:
            term *= a[i]
        total += term
    return float(total)


def hq_table(values: Sequence[float], qmax: int) -> np.ndarray:
    """Table ``T[j, q] = H_q(a_1, ..., a_{j+1})`` for ``q = 0..qmax``.

    Built column by column from the recurrence, so repeated variables are
    handled exactly like distinct ones.
    """
    a = _as_vars(values)
    qmax = _check_degree(qmax)
    table = np.empty((a.size, qmax + 1))
    prev = np.zeros(qmax + 1)
    prev[0] = 1.0
    for j, aj in enumerate(a):
        row = np.empty(qmax + 1)
        row[0] = 1.0
        for q in range(1, qmax + 1):
            row[q] = prev[q] + aj * row[q - 1]
        table[j] = row
        prev = row
    return table


def hq_recurrence(values: Sequence[float], q: int) -> float:
    """Evaluate ``H_q`` through the one-variable-at-a-time recurrence."""
    q = _check_degree(q)
    return float(hq_table(values, q)[-1, q])


def hq_sylvester(values: Sequence[float], q: int, tol: float = DISTINCT_RTOL) -> float:
    """Evaluate ``H_q`` through the rational form.

    The form divides by ``a_j - a_i`` and loses roughly ``log10(1/sep)``
    digits, so nearly coincident variables are refused.

    Raises
    ------
    DegenerateVariables
        if the variables are not pairwise separated by more than ``tol``
        (relative to ``max |a_i|``); use :func:`hq_recurrence` instead.
    """
    a = _as_vars(values)
    q = _check_degree(q)
    if not distinct(a, tol):
        raise DegenerateVariables(
            f"variables are not separated by more than {tol:g} (relative); "
            "use hq_recurrence"
        )
    m = a.size
    total = 0.0
    for j in range(m):
        diff = a[j] - np.delete(a, j)
        total += a[j] ** (q + m - 1) / np.prod(diff)
    return float(total)


def binom_real(alpha: float, k: int) -> float:
    """Binomial coefficient ``alpha (alpha-1) ... (alpha-k+1) / k!`` for real alpha."""
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a non-negative integer: {k!r}")
    result = 1.0
    for i in range(int(k)):
        result *= (alpha - i) / (i + 1)
    return result


def stirling2(n: int, q: int) -> int:
    """Stirling number of the second kind, exact integer arithmetic."""
    if not (1 <= q <= n):
        raise ValueError(f"need 1 <= q <= n, got n={n}, q={q}")
    total = sum((-1) ** (q - i) * math.comb(q, i) * i**n for i in range(1, q + 1))
    result, rem = divmod(total, math.factorial(q))
    assert rem == 0
    return result


def gaussian_binomial(p: int, r: int, v: float) -> float:
    """Gaussian binomial coefficient ``[p choose r]_v``.

    At ``v == 1`` the removable singularity is filled in with the ordinary
    binomial coefficient.
    """
    if p < 0 or r < 0:
        raise ValueError("p and r must be non-negative")
    if r > p:
        return 0.0
    if v == 1.0:
        return float(math.comb(p, r))
    num = 1.0
    den = 1.0
    for i in range(r):
        num *= 1.0 - v ** (p - i)
        den *= 1.0 - v ** (i + 1)
    return num / den
