"""Fractional derivatives and integrals on grids, including derivatives with respect to a function.

Left-sided operators act on ``[a, x]`` and assume ``f(a) = 0``; samples are
ordered from ``x`` down to ``a`` (the point of evaluation first), so an
operator matrix is upper triangular and the value at ``x`` is the first
entry of the result.  Right-sided operators act on ``[x, b]``, assume
``f(b) = 0`` and return complex values with ``(-1)^alpha = e^(i alpha pi)``.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import comb, gamma

from fracmat import balakrishnan, twoband
from fracmat.errors import NonVanishingAtA, NonVanishingAtB, ToleranceNotMet
from fracmat.funcspec import FunctionSpec, invert_monotone

__all__ = [
    "METHODS",
    "VANISH_TOL",
    "FracResult",
    "Grid",
    "SampleVector",
    "frac_deriv_wrt",
    "gl_left",
    "gl_right",
    "operator_matrix",
    "rl_wrt_quadrature",
    "taylor_wrt",
]

METHODS = ("matrix-power", "balakrishnan")
VANISH_TOL = 1.0e-10


@dataclass(frozen=True)
class Grid:
    """Uniform partition ``a = x_0 < x_1 < ... < x_n = x``."""

    a: float
    x: float
    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer: {self.n!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.x) and self.a < self.x):
            raise ValueError(f"need finite a < x, got a={self.a!r}, x={self.x!r}")

    @property
    def h(self) -> float:
        return (self.x - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        xs = self.a + self.h * np.arange(self.n + 1)
        xs[-1] = self.x
        return xs


@dataclass(frozen=True)
class SampleVector:
    """Samples of ``f`` without the vanishing endpoint.

    ``side="left"``: ``values[j] = f(x_{n-j})``.
    ``side="right"``: ``values[j] = f(x_j)``.
    """

    values: np.ndarray
    side: str = "left"

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        object.__setattr__(self, "values", np.asarray(self.values))

    @classmethod
    def sample(cls, f: Callable, grid: Grid, side: str = "left") -> SampleVector:
        xs = grid.nodes
        fx = np.asarray(f(xs), dtype=float) * np.ones_like(xs)
        if side == "left":
            if abs(fx[0]) > VANISH_TOL:
                raise NonVanishingAtA(
                    f"f(a) = {float(fx[0])!r}, but left-sided operators need f(a) = 0"
                )
            return cls(fx[:0:-1].copy(), "left")
        if abs(fx[-1]) > VANISH_TOL:
            raise NonVanishingAtB(
                f"f(b) = {float(fx[-1])!r}, but right-sided operators need f(b) = 0"
            )
        return cls(fx[:-1].copy(), "right")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class FracResult:
    """Operator applied on a grid.

    ``per_node`` follows the sample ordering (left: ``x_n`` first; right:
    ``x_0`` first) and ``value == per_node[0]``.
    """

    value: float | complex
    per_node: np.ndarray
    method: str
    grid: Grid
    alpha: float
    nodes: np.ndarray = field(repr=False, default=None)


# {{{ Grunwald-Letnikov sums


def gl_left(f: Callable, grid: Grid, alpha: float) -> FracResult:
    """Left Grunwald-Letnikov derivative (``alpha > 0``) or integral (``alpha < 0``).

    ``h^-alpha sum_k (-1)^k binom(alpha, k) f(x - k h)``, truncated at the
    left endpoint where the samples vanish.
    """
    fv = SampleVector.sample(f, grid, "left")
    n = grid.n
    w = twoband.gl_weights(alpha, n)
    asc = fv.values[::-1]  # f(x_1), ..., f(x_n)
    out = np.convolve(w, asc)[:n] * grid.h ** (-alpha)
    per_node = out[::-1]
    return FracResult(
        float(per_node[0]), per_node, "gl-sum", grid, float(alpha), grid.nodes[:0:-1]
    )


def gl_right(f: Callable, grid: Grid, alpha: float) -> FracResult:
    """Right Grunwald-Letnikov operator on ``[x, b]`` with ``grid.a = x`` and ``grid.x = b``.

    ``e^(i alpha pi) h^-alpha sum_k (-1)^k binom(alpha, k) f(x + k h)``; the
    same expression with negative ``alpha`` is the right integral.  With
    this branch, integer orders give ordinary derivatives.
    """
    fv = SampleVector.sample(f, grid, "right")
    n = grid.n
    w = twoband.gl_weights(alpha, n)
    # out[j] = sum_k w_k f(x_{j+k})
    out = np.convolve(fv.values[::-1], w)[:n][::-1]
    phase = cmath.exp(1j * math.pi * alpha)
    if float(alpha).is_integer():
        phase = complex((-1) ** int(alpha), 0.0)
    per_node = phase * grid.h ** (-alpha) * out
    return FracResult(
        complex(per_node[0]), per_node, "gl-sum", grid, float(alpha), grid.nodes[:-1]
    )


# }}}


# {{{ derivative with respect to a function


def _g_samples(g: Callable, grid: Grid) -> np.ndarray:
    xs = grid.nodes
    gv = np.asarray(g(xs), dtype=float) * np.ones_like(xs)
    return (gv - gv[0])[::-1]  # g(x_n) - g(a), ..., 0


def operator_matrix(
    g: Callable, grid: Grid, alpha: float, method: str = "matrix-power", **kwargs
) -> twoband.UpperTriangularMatrix:
    """``A_n^alpha`` for the two-band matrix built from ``g`` on the grid."""
    A = twoband.from_g_samples(_g_samples(g, grid))
    if method == "matrix-power":
        return twoband.real_power(A, alpha)
    if method == "balakrishnan":
        alpha = float(alpha)
        scheme = kwargs.get("scheme")
        if alpha == 0:
            return twoband.natural_power(A, 0)
        if 0 < alpha < 1:
            return balakrishnan.frac_power_bf01(A, alpha, scheme)
        if -1 < alpha < 0:
            return balakrishnan.neg_power_bf03(A, -alpha, scheme)
        if alpha.is_integer() and alpha > 0:
            return twoband.natural_power(A, int(alpha))
        if alpha > 1:
            ell = int(math.floor(alpha)) + 1
            return balakrishnan.frac_power_bf02(A, alpha, ell, scheme)
        return balakrishnan.neg_power_bf03(A, -alpha, scheme)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def frac_deriv_wrt(
    f: Callable | SampleVector,
    g: Callable,
    grid: Grid,
    alpha: float,
    method: str = "matrix-power",
    **kwargs,
) -> FracResult:
    """Fractional derivative (or integral, ``alpha < 0``) of ``f`` with respect to ``g``.

    ``g`` must be strictly increasing on the grid; it is shifted so that
    ``g(a) = 0``.  ``f`` is either a function with ``f(a) = 0`` or an
    already-sampled left :class:`SampleVector` (e.g. the ``per_node`` output
    of a previous call).

    Raises
    ------
    NonMonotoneSamples
        if ``g`` is not strictly increasing on the grid.
    NonVanishingAtA
        if ``f(a) != 0``.
    """
    if isinstance(f, SampleVector):
        if f.side != "left" or len(f) != grid.n:
            raise ValueError("expected a left sample vector of length n")
        fv = f
    else:
        fv = SampleVector.sample(f, grid, "left")
    P = operator_matrix(g, grid, alpha, method, **kwargs)
    per_node = P.data @ fv.values
    return FracResult(
        float(per_node[0]), per_node, f"{method}/{P.route}", grid, float(alpha), grid.nodes[:0:-1]
    )


def rl_wrt_quadrature(
    f: FunctionSpec,
    g: FunctionSpec,
    x: float,
    alpha: float,
    tol: float = 1.0e-10,
    a: float | None = None,
    *,
    full_output: bool = False,
):
    """Riemann-Liouville derivative (``0 <= alpha < 1``) or integral (``alpha < 0``) with respect to ``g``.

    In the variable ``u = g(t) - g(a)`` with ``G = g(x) - g(a)`` and
    ``phi = f o g^-1``, the derivative is

        (phi(0) G^-alpha + int_0^G phi'(u) (G - u)^-alpha du) / Gamma(1 - alpha)

    and the integral of order ``beta = -alpha`` is
    ``int_0^G phi(u) (G - u)^(beta - 1) du / Gamma(beta)``.  The algebraic
    endpoint singularity is handled by QUADPACK's weighted rule.

    Raises
    ------
    ToleranceNotMet
        if the quadrature error estimate exceeds ``tol``.
    """
    alpha = float(alpha)
    if alpha >= 1:
        raise ValueError("only orders below 1 are supported")
    a = g.a if a is None else float(a)
    ga = g(a)
    G = g(x) - ga
    if not G > 0:
        raise ValueError("g must increase from a to x")

    def inv(u):
        return invert_monotone(g, min(u + ga, g(x)))

    if alpha < 0:
        beta = -alpha
        val, err = quad(lambda u: f(inv(u)), 0.0, G, weight="alg", wvar=(0.0, beta - 1.0),
                        epsabs=tol, epsrel=0.0, limit=200)
        val /= gamma(beta)
        err /= gamma(beta)
    else:

        def dphi(u):
            X = inv(u)
            return f.derivative(X) / g.derivative(X)

        if alpha == 0:
            val, err = quad(dphi, 0.0, G, epsabs=tol, epsrel=0.0, limit=200)
        else:
            val, err = quad(dphi, 0.0, G, weight="alg", wvar=(0.0, -alpha),
                            epsabs=tol, epsrel=0.0, limit=200)
        val = (f(a) * G ** (-alpha) + val) / gamma(1.0 - alpha)
        err /= gamma(1.0 - alpha)
    if not err <= tol:
        raise ToleranceNotMet(f"quadrature error estimate {err:.3e} exceeds {tol:.1e}")
    return (float(val), float(err)) if full_output else float(val)


def taylor_wrt(f: Callable, g: FunctionSpec, a: float, x, m: int):
    """Taylor polynomial of ``f`` in powers of ``g(x) - g(a)``, degree ``m``.

    The ``k``-th derivative with respect to ``g`` is the ``k``-th derivative
    of ``f o g^-1`` at ``g(a)``, estimated by a centered ``k``-th difference
    with step ``eps^(1/(k+2)) max(1, |g(a)|)``.
    """
    if int(m) != m or m < 0:
        raise ValueError("order must be a non-negative integer")
    u0 = g(a)
    eps = np.finfo(float).eps
    coeffs = [float(f(a))]
    for k in range(1, int(m) + 1):
        hu = eps ** (1.0 / (k + 2)) * max(1.0, abs(u0))
        j = np.arange(k + 1)
        us = u0 + (k / 2.0 - j) * hu
        vals = np.array([f(invert_monotone(g, u)) for u in us])
        deriv = float(np.sum((-1.0) ** j * comb(k, j) * vals)) / hu**k
        coeffs.append(deriv / math.factorial(k))
    d = np.asarray(g(x), dtype=float) - u0
    out = np.polynomial.polynomial.polyval(d, coeffs)
    return float(out) if np.ndim(out) == 0 else out


# }}}
