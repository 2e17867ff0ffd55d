"""Real powers of two-band matrices and fractional calculus with respect to a function."""

from __future__ import annotations

from fracmat.balakrishnan import (
    QuadratureScheme,
    frac_power_bf01,
    frac_power_bf02,
    neg_power_bf03,
)
from fracmat.convergence import (
    RateReport,
    SweepPlan,
    classify_growth,
    fit_slope,
    run_sweep,
)
from fracmat.errors import (
    DegenerateDiagonal,
    DegenerateVariables,
    DivergentTail,
    EvalDomainError,
    FracmatError,
    InversionFailure,
    NonMonotoneErrors,
    NonMonotoneSamples,
    NonPositiveDiagonal,
    NonVanishingAtA,
    NonVanishingAtB,
    NumericalBreakdown,
    OracleNotConverged,
    OutOfRange,
    ParseError,
    ToleranceNotMet,
    UnknownCatalogEntry,
)
from fracmat.fraccalc import (
    FracResult,
    Grid,
    SampleVector,
    frac_deriv_wrt,
    gl_left,
    gl_right,
    rl_wrt_quadrature,
    taylor_wrt,
)
from fracmat.funcspec import FunctionSpec, catalog, invert_monotone, parse
from fracmat.semigroup import (
    CharacteristicSemigroup,
    MatrixSemigroup,
    characteristic_at,
    matrix_semigroup_at,
    norm_estimate_c1,
)
from fracmat.symfun import (
    binom_real,
    gaussian_binomial,
    hq_monomial,
    hq_recurrence,
    hq_sylvester,
    stirling2,
)
from fracmat.twoband import (
    EigenFactors,
    TwoBandMatrix,
    UpperTriangularMatrix,
    eigendecompose,
    from_g_samples,
    natural_power,
    real_power,
    uniform_real_power,
)

__version__ = "0.1.0"

__all__ = [
    "CharacteristicSemigroup",
    "DegenerateDiagonal",
    "DegenerateVariables",
    "DivergentTail",
    "EigenFactors",
    "EvalDomainError",
    "FracResult",
    "FracmatError",
    "FunctionSpec",
    "Grid",
    "InversionFailure",
    "MatrixSemigroup",
    "NonMonotoneErrors",
    "NonMonotoneSamples",
    "NonPositiveDiagonal",
    "NonVanishingAtA",
    "NonVanishingAtB",
    "NumericalBreakdown",
    "OracleNotConverged",
    "OutOfRange",
    "ParseError",
    "QuadratureScheme",
    "RateReport",
    "SampleVector",
    "SweepPlan",
    "ToleranceNotMet",
    "TwoBandMatrix",
    "UnknownCatalogEntry",
    "UpperTriangularMatrix",
    "binom_real",
    "catalog",
    "characteristic_at",
    "classify_growth",
    "eigendecompose",
    "fit_slope",
    "frac_deriv_wrt",
    "frac_power_bf01",
    "frac_power_bf02",
    "from_g_samples",
    "gaussian_binomial",
    "gl_left",
    "gl_right",
    "hq_monomial",
    "hq_recurrence",
    "hq_sylvester",
    "invert_monotone",
    "matrix_semigroup_at",
    "natural_power",
    "neg_power_bf03",
    "norm_estimate_c1",
    "parse",
    "real_power",
    "rl_wrt_quadrature",
    "run_sweep",
    "stirling2",
    "taylor_wrt",
    "uniform_real_power",
]
