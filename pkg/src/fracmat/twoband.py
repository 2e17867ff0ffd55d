"""Two-band (upper bidiagonal) matrices and their powers.

A two-band matrix of order ``n`` carries ``a_k`` on the diagonal and
``-a_k`` on the superdiagonal of row ``k``::

    [a_1 -a_1             ]
    [     a_2 -a_2        ]
    [          ...   ...  ]
    [                 a_n ]

It is the discrete analogue of ``d/dg`` on a grid, with
``a_{k+1} = 1 / (g_k - g_{k+1})``.  This module computes

* natural powers through complete homogeneous symmetric polynomials,
* the eigendecomposition ``A = P D P^{-1}`` in closed form,
* arbitrary real powers ``A^alpha = P D^alpha P^{-1}`` (distinct diagonals),
* the binomial (Grunwald-Letnikov) matrix for uniform diagonals,
* and a logarithm/exponential fallback for clustered diagonals.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from fracmat import symfun
from fracmat.errors import (
    DegenerateDiagonal,
    NonMonotoneSamples,
    NonPositiveDiagonal,
    NumericalBreakdown,
)

__all__ = [
    "CLOSED_FORM_RTOL",
    "DISTINCT_RTOL",
    "UNIFORM_RTOL",
    "EigenFactors",
    "TwoBandMatrix",
    "UpperTriangularMatrix",
    "eigendecompose",
    "expm_triangular",
    "from_g_samples",
    "gl_weights",
    "logm_triangular",
    "natural_power",
    "real_power",
    "sqrtm_triangular",
    "uniform_real_power",
]

UNIFORM_RTOL = 1.0e-12
DISTINCT_RTOL = symfun.DISTINCT_RTOL

#: rounding-error estimate of the closed form, relative to the row maximum,
#: above which ``real_power`` switches to the log/exp fallback
CLOSED_FORM_RTOL = 1.0e-10

#: self-check tolerance of the fallback (semigroup law with alpha/2)
FALLBACK_RTOL = 1.0e-7

_EPS = np.finfo(float).eps


# {{{ matrix types


class UpperTriangularMatrix:
    """Immutable dense upper-triangular matrix.

    Entries below the diagonal are zero by construction.  ``route`` records
    which algorithm produced the matrix (``None`` if not applicable).
    """

    __slots__ = ("_data", "route")

    def __init__(self, data: Any, route: str | None = None) -> None:
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        arr = np.triu(arr)
        if not np.all(np.isfinite(arr)):
            raise NumericalBreakdown("matrix has non-finite entries")
        arr.setflags(write=False)
        self._data = arr
        self.route = route

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Read-only dense ``(n, n)`` view."""
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy() if copy else self._data
        return self._data.astype(dtype)

    def __getitem__(self, key):
        return self._data[key]

    def __matmul__(self, other):
        if isinstance(other, UpperTriangularMatrix):
            return UpperTriangularMatrix(self._data @ other._data)
        return self._data @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self._data

    def __repr__(self) -> str:
        route = f", route={self.route!r}" if self.route else ""
        return f"UpperTriangularMatrix(n={self.n}{route})"

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._data)))

    def upper_entries(self) -> list[float]:
        """Row-major list of the entries ``p_sm`` with ``s <= m``."""
        iu = np.triu_indices(self.n)
        return [float(v) for v in self._data[iu]]

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "entries": self.upper_entries()}

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> UpperTriangularMatrix:
        n = int(obj["n"])
        entries = np.asarray(obj["entries"], dtype=float)
        if entries.size != n * (n + 1) // 2:
            raise ValueError("entry count does not match dimension")
        data = np.zeros((n, n))
        data[np.triu_indices(n)] = entries
        return cls(data, route=obj.get("route"))


@dataclass(frozen=True, eq=False)
class TwoBandMatrix:
    """Two-band matrix stored as its diagonal ``(a_1, ..., a_n)``."""

    diag: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.diag, dtype=float).ravel()
        if a.size < 1:
            raise ValueError("a two-band matrix needs at least one diagonal entry")
        if not np.all(np.isfinite(a)):
            raise ValueError("diagonal entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "diag", a)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        a = self.diag
        return np.diag(a) - np.diag(a[:-1], k=1)

    def __array__(self, dtype=None, copy=None):
        out = self.dense()
        return out if dtype is None else out.astype(dtype)

    def uniform(self, tol: float = UNIFORM_RTOL) -> bool:
        """All diagonal entries equal to within ``tol`` relative to ``max |a_k|``."""
        a = self.diag
        scale = np.max(np.abs(a))
        return bool(np.max(np.abs(a - a[0])) <= tol * scale)

    def distinct(self, tol: float = DISTINCT_RTOL) -> bool:
        """Pairwise separation above ``tol`` relative to ``max |a_k|``."""
        return symfun.distinct(self.diag, tol)


@dataclass(frozen=True)
class EigenFactors:
    """Factors of ``A = P diag(D) Pinv``; ``P`` and ``Pinv`` have unit diagonal."""

    P: UpperTriangularMatrix
    D: np.ndarray
    Pinv: UpperTriangularMatrix

    def reconstruct(self) -> np.ndarray:
        return (self.P.data * self.D) @ self.Pinv.data


def _as_twoband(A: TwoBandMatrix | Sequence[float]) -> TwoBandMatrix:
    return A if isinstance(A, TwoBandMatrix) else TwoBandMatrix(A)


# }}}


# {{{ natural powers


def natural_power(A: TwoBandMatrix | Sequence[float], k: int) -> UpperTriangularMatrix:
    """Natural power ``A^k`` with entries
    ``p_sm = (-1)^(m-s) H_{k-m+s}(a_s..a_m) a_s ... a_{m-1}`` for ``s < m <= s+k``.

    Symmetric polynomials come from the recurrence table, so repeated
    diagonal entries are fine.
    """
    A = _as_twoband(A)
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a non-negative integer: {k!r}")
    k = int(k)
    a = A.diag
    n = A.n
    out = np.zeros((n, n))
    for s in range(n):
        width = min(n - s, k + 1)
        table = symfun.hq_table(a[s : s + width], k)
        prod = 1.0
        for j in range(width):
            out[s, s + j] = (-1) ** j * table[j, k - j] * prod
            prod *= a[s + j]
    return UpperTriangularMatrix(out, route="natural")


# }}}


# {{{ eigendecomposition and closed-form powers


def _log_factors(a: np.ndarray):
    """Log-magnitudes and signs of the eigenvector matrices ``P`` and ``P^{-1}``.

    ``b_sm = prod_{i=s}^{m-1} a_i / (a_i - a_m)`` and
    ``c_sm = prod_{i=s}^{m-1} a_i / prod_{i=s+1}^{m} (a_i - a_s)``.
    """
    n = a.size
    lb = np.full((n, n), -np.inf)
    sb = np.zeros((n, n))
    lc = np.full((n, n), -np.inf)
    sc = np.zeros((n, n))
    idx = np.arange(n)
    lb[idx, idx] = lc[idx, idx] = 0.0
    sb[idx, idx] = sc[idx, idx] = 1.0
    with np.errstate(divide="ignore"):
        for m in range(1, n):
            f = a[:m] / (a[:m] - a[m])
            lb[:m, m] = np.cumsum(np.log(np.abs(f))[::-1])[::-1]
            sb[:m, m] = np.cumprod(np.sign(f)[::-1])[::-1]
        for s in range(n - 1):
            f = a[s : n - 1] / (a[s + 1 :] - a[s])
            lc[s, s + 1 :] = np.cumsum(np.log(np.abs(f)))
            sc[s, s + 1 :] = np.cumprod(np.sign(f))
    return lb, sb, lc, sc


def _exp_signed(logmag: np.ndarray, sign: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.where(sign == 0, 0.0, sign * np.exp(logmag))


def eigendecompose(
    A: TwoBandMatrix | Sequence[float], tol: float = DISTINCT_RTOL
) -> EigenFactors:
    """Closed-form eigendecomposition ``A = P D P^{-1}`` for distinct diagonals.

    Raises
    ------
    DegenerateDiagonal
        if the diagonal entries are not pairwise distinct to ``tol``.
    """
    A = _as_twoband(A)
    if not A.distinct(tol):
        raise DegenerateDiagonal("eigendecomposition needs pairwise distinct diagonals")
    lb, sb, lc, sc = _log_factors(A.diag)
    P = UpperTriangularMatrix(_exp_signed(lb, sb), route="eigen")
    Pinv = UpperTriangularMatrix(_exp_signed(lc, sc), route="eigen")
    return EigenFactors(P=P, D=A.diag.copy(), Pinv=Pinv)


def _diag_function_closed_form(
    a: np.ndarray, log_fa: np.ndarray, sign_fa: np.ndarray, factors=None
):
    """``P diag(f(a)) P^{-1}`` with products kept in log-magnitude form.

    Returns the matrix and an estimate of its rounding error (entry-wise
    bound ``eps * n * sum_j |b_sj f(a_j) c_jm|``).  ``factors`` may carry a
    precomputed :func:`_log_factors` result.
    """
    n = a.size
    lb, sb, lc, sc = _log_factors(a) if factors is None else factors
    lb = lb + log_fa[None, :]
    sb = sb * sign_fa[None, :]
    rows = np.max(lb, axis=1)
    cols = np.max(lc, axis=0)
    left = _exp_signed(lb - rows[:, None], sb)
    right = _exp_signed(lc - cols[None, :], sc)
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(rows[:, None] + cols[None, :])
        value = scale * (left @ right)
        bound = scale * (np.abs(left) @ np.abs(right))
    value = np.triu(value)
    bound = _EPS * n * np.triu(bound)
    return value, bound


def _closed_form_power(a: np.ndarray, alpha: float):
    log_fa = alpha * np.log(a)
    return _diag_function_closed_form(a, log_fa, np.ones_like(a))


def _well_conditioned(value: np.ndarray, bound: np.ndarray, rtol: float) -> bool:
    if not (np.all(np.isfinite(value)) and np.all(np.isfinite(bound))):
        return False
    row_scale = np.max(np.abs(value), axis=1)
    return bool(np.all(np.max(bound, axis=1) <= rtol * row_scale))


def uniform_real_power(n: int, h: float, alpha: float) -> UpperTriangularMatrix:
    """Real power of the uniform matrix ``(1/h) (I - N)``.

    Entries ``p_sm = h^(-alpha) (-1)^(m-s) binom(alpha, m-s)``: the
    Grunwald-Letnikov weights arranged as an upper Toeplitz matrix.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not h > 0:
        raise ValueError(f"step must be positive: {h!r}")
    w = gl_weights(alpha, n)
    mat = toeplitz(np.r_[w[0], np.zeros(n - 1)], w) * h ** (-alpha)
    return UpperTriangularMatrix(mat, route="uniform")


def gl_weights(alpha: float, n: int) -> np.ndarray:
    """``w_k = (-1)^k binom(alpha, k)`` for ``k = 0..n-1``.

    Uses ``w_k = w_{k-1} (k - 1 - alpha) / k``, which hits exact zeros for
    non-negative integer ``alpha``.
    """
    w = np.empty(n)
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[k - 1] * ((k - 1 - alpha) / k)
    return w


def real_power(
    A: TwoBandMatrix | Sequence[float],
    alpha: float,
    *,
    uniform_tol: float = UNIFORM_RTOL,
    distinct_tol: float = DISTINCT_RTOL,
) -> UpperTriangularMatrix:
    """Principal real power ``A^alpha``.

    Routing:

    * uniform diagonal -> :func:`uniform_real_power` (``route="uniform"``);
    * distinct diagonal -> ``P D^alpha P^{-1}`` in closed form
      (``route="closed-form"``), unless its rounding-error estimate exceeds
      :data:`CLOSED_FORM_RTOL`;
    * otherwise -> ``exp(alpha log A)`` (``route="fallback"``).

    Raises
    ------
    NonPositiveDiagonal
        if some ``a_k <= 0`` and ``alpha`` is not a non-negative integer.
    NumericalBreakdown
        if the fallback fails its semigroup self-check.
    """
    A = _as_twoband(A)
    alpha = float(alpha)
    a = A.diag
    if np.any(a <= 0):
        if alpha >= 0 and alpha.is_integer():
            return natural_power(A, int(alpha))
        raise NonPositiveDiagonal("principal real powers need positive diagonal entries")

    if A.uniform(uniform_tol):
        return uniform_real_power(A.n, 1.0 / a[0], alpha)

    if A.distinct(distinct_tol):
        value, bound = _closed_form_power(a, alpha)
        if _well_conditioned(value, bound, CLOSED_FORM_RTOL):
            return UpperTriangularMatrix(value, route="closed-form")

    return UpperTriangularMatrix(_fallback_power(A.dense(), alpha), route="fallback")


# }}}


# {{{ clustered fallback: log / exp of triangular matrices


def sqrtm_triangular(T: np.ndarray) -> np.ndarray:
    """Principal square root of an upper-triangular matrix with positive diagonal.

    Superdiagonal-by-superdiagonal recurrence
    ``r_sm = (t_sm - sum_{s<k<m} r_sk r_km) / (r_ss + r_mm)``; the
    denominators are sums of positive numbers, so clustered eigenvalues
    are harmless.
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    R = np.zeros_like(T)
    d0 = np.sqrt(np.diag(T))
    R[np.arange(n), np.arange(n)] = d0
    for d in range(1, n):
        s = np.arange(n - d)
        m = s + d
        acc = T[s, m].copy()
        if d > 1:
            k = s[:, None] + np.arange(1, d)[None, :]
            acc -= np.sum(R[s[:, None], k] * R[k, m[:, None]], axis=1)
        R[s, m] = acc / (d0[s] + d0[m])
    return R


def expm_triangular(M: np.ndarray, degree: int = 13) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The scaling makes ``||M||_1 / 2^s <= 1/2``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    norm = np.max(np.sum(np.abs(M), axis=0)) if n else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = M / 2.0**s
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, degree + 1):
        term = term @ X / k
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


def logm_triangular(T: np.ndarray, max_roots: int = 64) -> np.ndarray:
    """Principal logarithm of an upper-triangular matrix with positive diagonal.

    Inverse scaling and squaring: take square roots until ``||T - I||_1 <= 1/4``,
    then ``log(I + X) = 2 atanh(X (2I + X)^{-1})`` summed as a series.
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    eye = np.eye(n)
    k = 0
    while np.max(np.sum(np.abs(T - eye), axis=0)) > 0.25:
        if k >= max_roots:
            raise NumericalBreakdown("square-root iteration for the logarithm did not settle")
        T = sqrtm_triangular(T)
        k += 1
    X = T - eye
    # Y = X (2I + X)^{-1}; both factors are triangular and commute
    Y = solve_triangular((2 * eye + X).T, X.T, lower=True).T
    Y2 = Y @ Y
    term = Y
    L = Y.copy()
    for j in range(1, 60):
        term = term @ Y2
        inc = term / (2 * j + 1)
        L += inc
        if np.max(np.abs(inc)) <= _EPS * max(1.0, np.max(np.abs(L))):
            break
    return 2.0 ** (k + 1) * np.triu(L)


def _fallback_power(T: np.ndarray, alpha: float) -> np.ndarray:
    """``T^alpha = c^alpha exp(alpha log(T / c))`` with ``c`` the geometric mean of the diagonal.

    Validated through the semigroup law ``(T^(alpha/2))^2 = T^alpha``.
    """
    d = np.diag(T)
    log_c = float(np.mean(np.log(d)))
    L = logm_triangular(T / math.exp(log_c))
    result = expm_triangular(alpha * L) * math.exp(alpha * log_c)
    half = expm_triangular(0.5 * alpha * L) * math.exp(0.5 * alpha * log_c)
    resid = np.max(np.abs(half @ half - result))
    scale = np.max(np.abs(result))
    if not np.isfinite(resid) or resid > FALLBACK_RTOL * scale:
        raise NumericalBreakdown(
            f"fallback power failed its self-check (residual {resid:.3e}, scale {scale:.3e})"
        )
    return np.triu(result)


# }}}


def from_g_samples(g_values: Sequence[float]) -> TwoBandMatrix:
    """Two-band matrix from samples ``g_0 > g_1 > ... > g_n`` (nodes right to left).

    ``a_{k+1} = 1 / (g_k - g_{k+1})``.

    Raises
    ------
    NonMonotoneSamples
        if some difference ``g_k - g_{k+1}`` is not positive.
    """
    g = np.asarray(g_values, dtype=float).ravel()
    if g.size < 2:
        raise ValueError("need at least two samples of g")
    diff = g[:-1] - g[1:]
    if not np.all(diff > 0):
        bad = int(np.argmax(~(diff > 0)))
        raise NonMonotoneSamples(
            f"g is not strictly increasing on the grid (difference {bad} is {diff[bad]!r})"
        )
    return TwoBandMatrix(1.0 / diff)
