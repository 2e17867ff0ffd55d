"""Empirical convergence rates: grid sweeps, log-log slopes, growth regimes."""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from fracmat.errors import (
    InversionFailure,
    NonMonotoneErrors,
    OracleNotConverged,
    ToleranceNotMet,
)
from fracmat.fraccalc import Grid, frac_deriv_wrt, rl_wrt_quadrature
from fracmat.funcspec import FunctionSpec
from fracmat.semigroup import CharacteristicSemigroup, norm_estimate_c1

__all__ = [
    "REGIMES",
    "SLOPE_MARGIN",
    "GrowthClass",
    "RateReport",
    "SweepPlan",
    "classify_growth",
    "fit_slope",
    "predicted_exponent",
    "run_sweep",
    "wrt_plan",
]

REGIMES = ("bounded", "polynomial", "exponential", "negative")
SLOPE_MARGIN = 0.2
BOUNDED_SLOPE = 0.1


def fit_slope(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of ``log y`` against ``log x`` and the RMS residual."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    coef, res, *_ = np.polyfit(lx, ly, 1, full=True)
    rms = math.sqrt(float(res[0]) / lx.size) if res.size else 0.0
    return float(coef[0]), rms


def predicted_exponent(regime: str, alpha: float, p: float = 0.0) -> float | None:
    """Lower bound on the rate in ``h``; ``None`` for the logarithmic regime."""
    if regime == "bounded":
        return min(abs(alpha), 1.0)
    if regime == "polynomial":
        return min(abs(alpha), 1.0) / (p + 1.0)
    if regime == "negative":
        return 1.0
    if regime == "exponential":
        return None
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")


@dataclass(frozen=True)
class SweepPlan:
    """Grid sizes ``n_min * 2^j``, a candidate ``n -> value`` and an oracle.

    ``oracle`` is either a number or a zero-argument callable; a callable
    that fails to converge aborts the sweep.
    """

    candidate: Callable[[int], float]
    oracle: float | Callable[[], float]
    alpha: float
    regime: str = "bounded"
    p: float = 0.0
    n_min: int = 64
    levels: int = 4
    interval: tuple[float, float] = (0.0, 1.0)
    label: str = ""
    workers: int = 1

    def __post_init__(self) -> None:
        if self.levels < 4:
            raise ValueError("a sweep needs at least four grid sizes")
        if self.n_min < 1:
            raise ValueError("n_min must be positive")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")

    @property
    def sizes(self) -> list[int]:
        return [self.n_min * 2**j for j in range(self.levels)]

    def steps(self) -> list[float]:
        a, x = self.interval
        return [(x - a) / n for n in self.sizes]


@dataclass(frozen=True)
class RateReport:
    sizes: list[int]
    steps: list[float]
    errors: list[float]
    slope: float
    residual: float
    predicted: float | None
    regime: str
    passed: bool
    monotone: bool
    oracle: float
    label: str = ""
    values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "regime": self.regime,
            "predicted": self.predicted,
            "slope": self.slope,
            "residual": self.residual,
            "passed": self.passed,
            "monotone": self.monotone,
            "oracle": self.oracle,
            "n": list(self.sizes),
            "h": list(self.steps),
            "error": list(self.errors),
        }


def run_sweep(plan: SweepPlan) -> RateReport:
    """Measure ``|candidate(n) - oracle|`` over the plan and fit the rate.

    Passing means ``slope >= predicted - 0.2``; in the logarithmic regime
    it means the errors decrease and the slope is positive.

    Raises
    ------
    OracleNotConverged
        if the oracle callable fails its own tolerance.
    """
    if callable(plan.oracle):
        try:
            oracle = float(plan.oracle())
        except (ToleranceNotMet, InversionFailure) as exc:
            raise OracleNotConverged(str(exc)) from exc
    else:
        oracle = float(plan.oracle)

    sizes = plan.sizes
    if plan.workers > 1:
        with ThreadPoolExecutor(plan.workers) as pool:
            values = list(pool.map(plan.candidate, sizes))
    else:
        values = [plan.candidate(n) for n in sizes]
    values = [float(v) for v in values]
    tiny = np.finfo(float).tiny
    errors = [max(abs(v - oracle), tiny) for v in values]
    steps = plan.steps()
    slope, residual = fit_slope(steps, errors)

    monotone = all(e1 < e0 for e0, e1 in zip(errors, errors[1:]))
    if not monotone:
        warnings.warn(
            f"errors do not decrease monotonically: {errors}", NonMonotoneErrors, stacklevel=2
        )
    predicted = predicted_exponent(plan.regime, plan.alpha, plan.p)
    if predicted is None:
        passed = monotone and slope > 0
    else:
        passed = slope >= predicted - SLOPE_MARGIN
    return RateReport(
        sizes=sizes,
        steps=steps,
        errors=errors,
        slope=slope,
        residual=residual,
        predicted=predicted,
        regime=plan.regime,
        passed=bool(passed),
        monotone=monotone,
        oracle=oracle,
        label=plan.label,
        values=values,
    )


def wrt_plan(
    f: FunctionSpec,
    g: FunctionSpec,
    alpha: float,
    a: float = 0.0,
    x: float = 1.0,
    *,
    oracle: float | None = None,
    method: str = "matrix-power",
    regime: str | None = None,
    p: float = 0.0,
    n_min: int = 64,
    levels: int = 4,
    oracle_tol: float = 1.0e-8,
) -> SweepPlan:
    """Plan comparing :func:`frac_deriv_wrt` with the quadrature oracle (or a given value)."""
    if regime is None:
        regime = "negative" if alpha < 0 else "bounded"

    def candidate(n: int) -> float:
        return frac_deriv_wrt(f, g, Grid(a, x, n), alpha, method).value

    if oracle is None:

        def oracle_fn() -> float:
            return rl_wrt_quadrature(f, g, x, alpha, tol=oracle_tol, a=a)

        target: float | Callable[[], float] = oracle_fn
    else:
        target = oracle
    return SweepPlan(
        candidate=candidate,
        oracle=target,
        alpha=alpha,
        regime=regime,
        p=p,
        n_min=n_min,
        levels=levels,
        interval=(a, x),
        label=f"D^{alpha:g} of {f} wrt {g} on [{a:g}, {x:g}] ({method})",
    )


@dataclass(frozen=True)
class GrowthClass:
    regime: str
    p: float
    slope: float
    times: list[float]
    estimates: list[float]


def classify_growth(
    g: FunctionSpec,
    interval: tuple[float, float],
    probe_times: Sequence[float] = (10.0, 31.6, 100.0, 316.0, 1000.0),
    n_probe: int = 64,
) -> GrowthClass:
    """Classify how ``|dX_x(t)/dx|`` grows along the characteristics of ``g``.

    The flow is taken on ``[interval[0], inf)`` in the direction that moves
    towards infinity, so trajectories started in ``interval`` are never
    killed.  A log-log slope at most 0.1 is reported as ``"bounded"``,
    anything larger as ``"polynomial"`` with ``p`` equal to the slope.
    """
    lo, hi = map(float, interval)
    mono = FunctionSpec(g.expr, a=lo, b=math.inf, name=g.name,
                        derivative_expr=g.derivative_expr).monotonicity()
    direction = 1 if mono == "increasing" else -1
    C = CharacteristicSemigroup(g, a=lo, b=math.inf, direction=direction)
    nodes = np.linspace(lo, hi, n_probe)
    times = [float(t) for t in probe_times]
    est = [float(norm_estimate_c1(C, t, nodes)) for t in times]
    pos = [(t, e) for t, e in zip(times, est) if e > 0]
    if len(pos) < 2:
        return GrowthClass("bounded", 0.0, 0.0, times, est)
    slope, _ = fit_slope(*zip(*pos))
    if slope <= BOUNDED_SLOPE:
        return GrowthClass("bounded", 0.0, slope, times, est)
    return GrowthClass("polynomial", slope, slope, times, est)
