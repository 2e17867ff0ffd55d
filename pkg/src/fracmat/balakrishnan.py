"""Fractional powers of a generator from its semigroup by quadrature.

For ``S(t) = exp(-t A)`` with a positive diagonal:

* ``A^alpha = 1/Gamma(-alpha) int_0^inf t^(-alpha-1) (S(t) - I) dt`` for ``0 < alpha < 1``,
* ``A^alpha = 1/C int_0^inf t^(-alpha-1) (I - S(t))^ell dt`` for ``0 < alpha < ell``,
* ``A^(-alpha) = 1/Gamma(alpha) int_0^inf t^(alpha-1) S(t) dt`` for ``alpha > 0``.

The integrals are computed on logarithmic panels ``t = e^u`` with
Gauss-Legendre nodes, analytic corrections below a tiny ``t_0`` and
above a horizon ``T``.  The panel density is doubled until two successive
results agree to the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import comb, gamma

from fracmat.errors import DivergentTail, ToleranceNotMet
from fracmat.semigroup import MatrixSemigroup
from fracmat.twoband import TwoBandMatrix, UpperTriangularMatrix

__all__ = [
    "QuadratureReport",
    "QuadratureScheme",
    "bf02_normalizer",
    "bf02_normalizer_closed_form",
    "frac_power_bf01",
    "frac_power_bf02",
    "neg_power_bf03",
]


@dataclass(frozen=True)
class QuadratureScheme:
    """Discretization of the semigroup integrals.

    ``t_max=None`` picks ``(40 + 2 n) / min a_k``, which leaves both the
    exponential tail and the polynomial prefactors of a non-normal
    ``exp(-t A)`` below double precision.
    """

    #: small-time cut-off is ``t_min_scale / max a_k``
    t_min_scale: float = 1.0e-6
    t_max: float | None = None
    panels_per_decade: int = 1
    nodes: int = 20
    tol: float = 1.0e-10
    max_panels_per_decade: int = 64
    #: ``False`` evaluates once at ``panels_per_decade`` without refinement
    adaptive: bool = True

    def __post_init__(self) -> None:
        if self.panels_per_decade < 1 or self.nodes < 2:
            raise ValueError("need at least one panel per decade and two nodes")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def horizon(self, a: np.ndarray) -> tuple[float, float]:
        t0 = self.t_min_scale / float(np.max(a))
        T = self.t_max if self.t_max is not None else (40.0 + 2.0 * a.size) / float(np.min(a))
        if not T > t0:
            raise ValueError("integration horizon is below the small-time cut-off")
        return t0, T

    def rule(self, t0: float, T: float, panels_per_decade: int | None = None):
        """Nodes and weights in ``t`` on ``[t0, T]`` (the ``dt`` measure)."""
        ppd = panels_per_decade or self.panels_per_decade
        decades = math.log10(T / t0)
        m = max(1, math.ceil(decades * ppd))
        edges = np.linspace(math.log(t0), math.log(T), m + 1)
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        t = np.exp(u)
        return t, wu * t


@dataclass(frozen=True)
class QuadratureReport:
    value: UpperTriangularMatrix
    panels: int
    panels_per_decade: int
    change: float


def _semigroup(S) -> MatrixSemigroup:
    if isinstance(S, MatrixSemigroup):
        return S
    if not isinstance(S, TwoBandMatrix):
        S = TwoBandMatrix(np.asarray(S, dtype=float))
    return MatrixSemigroup(S)


def _check_generator(S: MatrixSemigroup) -> np.ndarray:
    a = S.generator.diag
    if np.any(a <= 0):
        raise DivergentTail("semigroup integrals need a positive diagonal")
    return a


def _adaptive(S: MatrixSemigroup, scheme: QuadratureScheme, integrand, corrections) -> QuadratureReport:
    a = _check_generator(S)
    t0, T = scheme.horizon(a)
    extra = corrections(t0, T)
    ppd = scheme.panels_per_decade
    prev = None
    change = math.inf
    while True:
        t, w = scheme.rule(t0, T, ppd)
        total = np.zeros((S.n, S.n))
        for ti, wi in zip(t, w):
            total += wi * integrand(ti)
        total += extra
        if not scheme.adaptive:
            return QuadratureReport(
                UpperTriangularMatrix(np.triu(total), route="balakrishnan"),
                panels=t.size // scheme.nodes,
                panels_per_decade=ppd,
                change=math.nan,
            )
        if prev is not None:
            change = float(np.max(np.abs(total - prev)))
            if change <= scheme.tol * max(1.0, float(np.max(np.abs(total)))):
                return QuadratureReport(
                    UpperTriangularMatrix(np.triu(total), route="balakrishnan"),
                    panels=t.size // scheme.nodes,
                    panels_per_decade=ppd,
                    change=change,
                )
        if ppd >= scheme.max_panels_per_decade:
            raise ToleranceNotMet(
                f"panel refinement stalled at {ppd} panels per decade "
                f"(last change {change:.3e}, tolerance {scheme.tol:.1e})"
            )
        prev = total
        ppd *= 2


def _check_fraction(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"order must lie in (0, 1): {alpha!r}")
    return alpha


def frac_power_bf01(
    S, alpha: float, scheme: QuadratureScheme | None = None, *, report: bool = False
):
    """``A^alpha`` for ``0 < alpha < 1`` from ``S(t) - I``.

    Raises
    ------
    ToleranceNotMet
        if panel doubling does not settle.
    DivergentTail
        if the generator has a non-positive diagonal entry.
    """
    alpha = _check_fraction(alpha)
    S = _semigroup(S)
    scheme = scheme or QuadratureScheme()
    A = S.generator.dense()
    eye = np.eye(S.n)
    g = gamma(-alpha)

    def integrand(t):
        return t ** (-alpha - 1) * S.deviation(t) / g

    def corrections(t0, T):
        # int_0^t0 t^(-alpha-1) (-tA + t^2 A^2 / 2) dt  and  int_T^inf t^(-alpha-1) (-I) dt
        head = -A * t0 ** (1 - alpha) / (1 - alpha) + (A @ A) * t0 ** (2 - alpha) / (2 * (2 - alpha))
        tail = -eye * T ** (-alpha) / alpha
        return (head + tail) / g

    rep = _adaptive(S, scheme, integrand, corrections)
    return rep if report else rep.value


def bf02_normalizer(alpha: float, ell: int, scheme: QuadratureScheme | None = None) -> float:
    """``int_0^inf t^(-alpha-1) (1 - e^(-t))^ell dt`` by the same quadrature."""
    rep = _bf02_raw(MatrixSemigroup(TwoBandMatrix(np.array([1.0]))), alpha, ell, scheme)
    return float(rep.value.data[0, 0])


def bf02_normalizer_closed_form(alpha: float, ell: int) -> float:
    """``Gamma(-alpha) sum_k (-1)^k C(ell, k) k^alpha`` (non-integer ``alpha``)."""
    k = np.arange(ell + 1)
    return float(gamma(-alpha) * np.sum((-1.0) ** k * comb(ell, k) * k.astype(float) ** alpha))


def _bf02_raw(S: MatrixSemigroup, alpha: float, ell: int, scheme: QuadratureScheme | None):
    scheme = scheme or QuadratureScheme()
    A = S.generator.dense()
    Al = np.linalg.matrix_power(A, ell)
    Al1 = Al @ A
    eye = np.eye(S.n)

    def integrand(t):
        return t ** (-alpha - 1) * np.linalg.matrix_power(-S.deviation(t), ell)

    def corrections(t0, T):
        # (I - S)^ell = t^ell A^ell - (ell/2) t^(ell+1) A^(ell+1) + ...;  tail: (I - S)^ell -> I
        head = Al * t0 ** (ell - alpha) / (ell - alpha) - 0.5 * ell * Al1 * t0 ** (
            ell + 1 - alpha
        ) / (ell + 1 - alpha)
        tail = eye * T ** (-alpha) / alpha
        return head + tail

    return _adaptive(S, scheme, integrand, corrections)


def frac_power_bf02(
    S, alpha: float, ell: int = 2, scheme: QuadratureScheme | None = None, *, report: bool = False
):
    """``A^alpha`` for ``0 < alpha < ell`` from the ``ell``-th power of ``I - S(t)``.

    The normalizing constant is integrated with the same scheme on the
    scalar semigroup ``e^(-t)``, so ``n = 1, a = 1`` returns 1 by construction.
    """
    alpha = float(alpha)
    ell = int(ell)
    if ell < 1 or not 0 < alpha < ell or alpha.is_integer():
        raise ValueError(f"need a non-integer order in (0, ell), got alpha={alpha!r}, ell={ell}")
    S = _semigroup(S)
    _check_generator(S)
    C = bf02_normalizer(alpha, ell, scheme)
    rep = _bf02_raw(S, alpha, ell, scheme)
    value = UpperTriangularMatrix(rep.value.data / C, route="balakrishnan")
    rep = replace(rep, value=value)
    return rep if report else rep.value


def neg_power_bf03(
    S, alpha: float, scheme: QuadratureScheme | None = None, *, report: bool = False
):
    """``A^(-alpha)`` for ``alpha > 0`` as a Gamma-weighted Laplace transform of ``S``.

    Raises
    ------
    DivergentTail
        if the smallest diagonal entry is not positive.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"order must be positive: {alpha!r}")
    S = _semigroup(S)
    scheme = scheme or QuadratureScheme()
    A = S.generator.dense()
    eye = np.eye(S.n)
    g = gamma(alpha)

    def integrand(t):
        return t ** (alpha - 1) * S.at(t).data / g

    def corrections(t0, T):
        # S = I - tA + t^2 A^2 / 2 near 0; the tail beyond T is below double precision
        head = (
            eye * t0**alpha / alpha
            - A * t0 ** (alpha + 1) / (alpha + 1)
            + (A @ A) * t0 ** (alpha + 2) / (2 * (alpha + 2))
        )
        return head / g

    rep = _adaptive(S, scheme, integrand, corrections)
    return rep if report else rep.value
