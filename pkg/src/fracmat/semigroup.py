"""Contraction semigroups generated by two-band matrices and by characteristics.

:class:`MatrixSemigroup` evaluates ``S(t) = exp(-t A)`` for a two-band
generator ``A``.  :class:`CharacteristicSemigroup` transports a function
along the solutions of ``X' = +-1 / g'(X)``, i.e.
``(T_t f)(x) = f(g^{-1}(g(x) +- t))``, with killing once the
characteristic leaves the domain.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.stats import poisson

from fracmat import twoband
from fracmat.errors import NonMonotoneSamples
from fracmat.funcspec import FunctionSpec, invert_monotone
from fracmat.twoband import TwoBandMatrix, UpperTriangularMatrix

__all__ = [
    "STRATEGIES",
    "CharacteristicSemigroup",
    "MatrixSemigroup",
    "characteristic_at",
    "matrix_semigroup_at",
    "norm_estimate_c1",
]

STRATEGIES = ("uniform", "eigen", "series")

#: below this value of ``||t A||_1`` the deviation ``S(t) - I`` is summed
#: directly as a Taylor series instead of subtracting the identity
_SMALL_NORM = 0.5


# {{{ matrix semigroup


@dataclass(frozen=True, eq=False)
class MatrixSemigroup:
    """``t -> exp(-t A)`` for a two-band generator ``A``.

    The strategy defaults to ``"uniform"`` for a constant diagonal, to
    ``"eigen"`` for pairwise distinct entries and to ``"series"`` (scaling
    and squaring) otherwise.  The eigen strategy quietly switches to the
    series for any ``t`` where its rounding-error estimate is too large.
    """

    generator: TwoBandMatrix
    strategy: str | None = None
    _factors: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        gen = self.generator
        if not isinstance(gen, TwoBandMatrix):
            gen = TwoBandMatrix(np.asarray(gen, dtype=float))
            object.__setattr__(self, "generator", gen)
        strategy = self.strategy
        if strategy is None:
            if gen.uniform():
                strategy = "uniform"
            elif gen.distinct():
                strategy = "eigen"
            else:
                strategy = "series"
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        if strategy == "uniform" and not gen.uniform():
            raise ValueError("uniform strategy needs a constant diagonal")
        if strategy == "eigen":
            if not gen.distinct():
                # documented behaviour: degenerate diagonals use the series
                strategy = "series"
            else:
                object.__setattr__(self, "_factors", twoband._log_factors(gen.diag))
        object.__setattr__(self, "strategy", strategy)

    @property
    def n(self) -> int:
        return self.generator.n

    def _check_time(self, t: float) -> float:
        t = float(t)
        if not (t >= 0 and math.isfinite(t)):
            raise ValueError(f"time must be finite and non-negative: {t!r}")
        return t

    def at(self, t: float) -> UpperTriangularMatrix:
        """``exp(-t A)`` as an upper-triangular matrix."""
        t = self._check_time(t)
        n = self.n
        if t == 0:
            return UpperTriangularMatrix(np.eye(n), route=self.strategy)
        a = self.generator.diag
        if self.strategy == "uniform":
            row = poisson.pmf(np.arange(n), t * a[0])
            return UpperTriangularMatrix(_upper_toeplitz(row), route="uniform")
        if self.strategy == "eigen":
            value, bound = twoband._diag_function_closed_form(
                a, -t * a, np.ones(n), factors=self._factors
            )
            if twoband._well_conditioned(value, bound, twoband.CLOSED_FORM_RTOL):
                return UpperTriangularMatrix(value, route="eigen")
        return UpperTriangularMatrix(
            np.triu(twoband.expm_triangular(-t * self.generator.dense())), route="series"
        )

    def deviation(self, t: float) -> np.ndarray:
        """``exp(-t A) - I`` without cancellation for small ``t``."""
        t = self._check_time(t)
        n = self.n
        if t == 0:
            return np.zeros((n, n))
        a = self.generator.diag
        if self.strategy == "uniform":
            ta = t * a[0]
            row = poisson.pmf(np.arange(n), ta)
            row[0] = math.expm1(-ta)
            return _upper_toeplitz(row)
        if self.strategy == "eigen":
            em1 = -np.expm1(-t * a)
            value, bound = twoband._diag_function_closed_form(
                a, np.log(em1), -np.ones(n), factors=self._factors
            )
            if twoband._well_conditioned(value, bound, twoband.CLOSED_FORM_RTOL):
                return value
        M = -t * self.generator.dense()
        if np.max(np.sum(np.abs(M), axis=0)) <= _SMALL_NORM:
            return _expm1_series(M)
        return np.triu(twoband.expm_triangular(M)) - np.eye(n)

    def at_many(self, ts: Sequence[float]) -> np.ndarray:
        """Stack of ``exp(-t A)`` for every ``t`` in ``ts``, shape ``(len(ts), n, n)``."""
        return np.stack([self.at(t).data for t in ts]) if len(ts) else np.zeros((0, self.n, self.n))


def _upper_toeplitz(row: np.ndarray) -> np.ndarray:
    return toeplitz(np.r_[row[0], np.zeros(row.size - 1)], row)


def _expm1_series(M: np.ndarray) -> np.ndarray:
    term = M.copy()
    total = M.copy()
    eps = np.finfo(float).eps
    for k in range(2, 60):
        term = term @ M / k
        total += term
        if np.max(np.abs(term)) <= eps * np.max(np.abs(total)):
            break
    return np.triu(total)


def matrix_semigroup_at(S: MatrixSemigroup | TwoBandMatrix, t: float) -> UpperTriangularMatrix:
    """``exp(-t A)``; a bare generator is wrapped with the automatic strategy."""
    if not isinstance(S, MatrixSemigroup):
        S = MatrixSemigroup(S)
    return S.at(t)


# }}}


# {{{ characteristic semigroup


@dataclass(frozen=True, eq=False)
class CharacteristicSemigroup:
    """Transport along characteristics of a strictly monotone ``g``.

    ``flow(t, x) = g^{-1}(g(x) + direction * t)``.  The default moves
    along increasing ``g``; ``direction=-1`` reverses the flow, as needed for
    the familiar ``g = +-x^beta`` transports.  Once
    ``g(x) + direction * t`` reaches the boundary of ``g([a, b])`` the
    trajectory is killed and the transported value is 0.
    """

    g: FunctionSpec
    a: float | None = None
    b: float | None = None
    direction: int = 1

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        a = self.g.a if self.a is None else float(self.a)
        b = self.g.b if self.b is None else float(self.b)
        if (a, b) != (self.g.a, self.g.b):
            object.__setattr__(
                self,
                "g",
                FunctionSpec(
                    self.g.expr,
                    a=a,
                    b=b,
                    name=self.g.name,
                    inverse=self.g.inverse,
                    derivative_expr=self.g.derivative_expr,
                ),
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.g.monotonicity() == "none":
            raise NonMonotoneSamples(f"{self.g} is not strictly monotone on [{a}, {b}]")

    def _image(self) -> tuple[float, float]:
        return self.g.image()

    def flow(self, t: float, x: float) -> float:
        """Position ``X_x(t)``, or ``nan`` once the trajectory is killed."""
        t = float(t)
        x = float(x)
        if t < 0:
            raise ValueError("time must be non-negative")
        if not self.a <= x <= self.b:
            raise ValueError(f"{x!r} is outside [{self.a}, {self.b}]")
        if t == 0:
            return x
        y = self.g(x) + self.direction * t
        lo, hi = self._image()
        if not lo < y < hi:
            return math.nan
        return invert_monotone(self.g, y)

    def kill_time(self, x: float) -> float:
        """First time at which the trajectory started at ``x`` is killed."""
        lo, hi = self._image()
        gx = self.g(float(x))
        return (hi - gx) if self.direction > 0 else (gx - lo)

    def apply(self, t: float, f: Callable, x):
        """``(T_t f)(x)`` for scalar or array ``x``."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(xs.shape)
        for i, xi in enumerate(xs):
            if t == 0:
                out[i] = f(xi)
                continue
            X = self.flow(t, xi)
            out[i] = 0.0 if math.isnan(X) else f(X)
        return float(out[0]) if np.ndim(x) == 0 else out

    def transported(self, t: float, f: Callable) -> Callable[[float], float]:
        """``T_t f`` as a new callable (for composing ``T_s T_t``)."""
        return lambda x: self.apply(t, f, x)


def characteristic_at(C: CharacteristicSemigroup, t: float, f: Callable, x) -> float:
    """``f(g^{-1}(g(x) +- t))``, or 0 once the characteristic has been killed."""
    return C.apply(t, f, x)


def norm_estimate_c1(
    C: CharacteristicSemigroup, t: float, probe_nodes, rel_step: float = 1.0e-5
) -> float:
    """``max |d X_x(t) / dx|`` over the probe nodes, by finite differences.

    Killed nodes contribute 0; next to the kill point (or a domain edge)
    one-sided differences are used.
    """
    nodes = np.asarray(getattr(probe_nodes, "nodes", probe_nodes), dtype=float).ravel()
    best = 0.0
    for x in nodes:
        X0 = C.flow(t, x)
        if math.isnan(X0):
            continue
        d = rel_step * max(1.0, abs(x))
        xp, xm = x + d, x - d
        Xp = C.flow(t, xp) if xp <= C.b else math.nan
        Xm = C.flow(t, xm) if xm >= C.a else math.nan
        if not math.isnan(Xp) and not math.isnan(Xm):
            slope = (Xp - Xm) / (2 * d)
        elif not math.isnan(Xp):
            slope = (Xp - X0) / d
        elif not math.isnan(Xm):
            slope = (X0 - Xm) / d
        else:
            continue
        best = max(best, abs(slope))
    return best


# }}}
