"""Model selection and search directions over span{g_k, s_{k-1}}.

Four cases: the p-regularized model (PREG), the quadratic model (QUAD),
the HS conjugate gradient direction (HS) and the negative gradient (NEGGRAD).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from model_core import (
    CollinearityError,
    CurvatureError,
    DirKind,
    IndefiniteModelError,
    NormKind,
    NumericError,
    SolverParams,
    SolverState,
    Variant,
)
from smcg_protocols import Vector
from subproblem import SubproblemInput, solve_euclidnorm, solve_hessnorm

# thresholds of the ill-conditioning test
ILLCOND_CURVATURE = 1e-5
ILLCOND_TRAPEZOID = 1e-6
# margin of the collinearity screen of the Euclidean variant
COLLINEARITY_MARGIN = 1e-5


class ModelKind(str, Enum):
    PREG = "PREG"
    QUAD = "QUAD"
    HS = "HS"
    NEGGRAD = "NEGGRAD"


class Reason(str, Enum):
    REGULARIZED = "regularized"
    QUAD_T_SMALL = "t_k small"
    QUAD_THETA = "theta_k close to 1"
    QUAD_ILL_CONDITIONED = "ill-conditioned"
    HS_CONJUGATE = "HS condition"
    NEGGRAD_FALLBACK = "no model condition"


@dataclass(frozen=True)
class Indicators:
    t_k: float
    theta_k: float
    r_prev: float
    rbar_prev: float
    rho_k: float
    sigma_k: float


@dataclass(frozen=True)
class ModelChoice:
    kind: ModelKind
    reason: Reason


@dataclass(frozen=True)
class SubspaceData:
    """Inner products of g_k, s_{k-1} and y_{k-1}"""

    gg: float
    gs: float
    gy: float
    sty: float
    ss: float
    yy: float

    @classmethod
    def of(cls, state: SolverState) -> "SubspaceData":
        if state.pair is None:
            raise CurvatureError("no step pair yet")
        g, pair = state.g, state.pair
        return cls(
            gg=float(g @ g),
            gs=float(g @ pair.s),
            gy=float(g @ pair.y),
            sty=pair.sty,
            ss=pair.ss,
            yy=pair.yy,
        )


def descent_constant(params: SolverParams) -> float:
    """The constant c of g^T d <= -c ||g||^2 shared by all four cases"""
    xi2 = params.xi2
    return min(
        0.5,
        1.0 - params.xi3,
        2.0 / (3.0 * xi2),
        1.0 / (3.0 * xi2),
        2.0 / (5.0 * xi2),
    )


def direction_bound_constant(params: SolverParams) -> float:
    """The constant of ||d|| <= c ||g|| for the non-HS cases"""
    return max(1.0, 20.0 / params.xi1)


def compute_t(f_prev: float, f_cur: float, gts: float, sty: float) -> float:
    """How close f is to a quadratic on the segment [x_{k-1}, x_k]"""
    if not sty > 0:
        raise CurvatureError(f"s^T y = {sty:g} is not positive")
    return abs(2.0 * (f_prev - f_cur + gts) / sty - 1.0)


def compute_theta(f_prev: float, f_cur: float, gts: float, sty: float) -> float:
    """Ratio of actual to predicted reduction; nan when undefined"""
    denominator = 0.5 * sty - gts
    if denominator == 0:
        return math.nan
    return (f_prev - f_cur) / denominator


def compute_sigma_k(
        p: float,
        f_prev: float,
        f_cur: float,
        gts: float,
        sty: float,
        ss: float,
        norm_kind: NormKind,
        euclid_exponent: str = "half",
) -> float:
    """Regularization weight from the interpolation condition on f_{k-1}"""
    numerator = p * abs(f_prev - f_cur + gts - 0.5 * sty)
    if norm_kind is NormKind.HESSNORM:
        if not sty > 0:
            raise CurvatureError(f"s^T y = {sty:g} is not positive")
        return numerator / sty ** (p / 2)
    if not ss > 0:
        raise CurvatureError("the last step vanished")
    exponent = p / 2 if euclid_exponent == "half" else p
    return numerator / math.sqrt(ss) ** exponent


def compute_rho(data: SubspaceData) -> float:
    """The BBCG3 estimate of g^T H g"""
    return 1.5 * data.yy / data.sty * data.gg


def compute_indicators(state: SolverState, params: SolverParams) -> Indicators:
    """All quantities the model choice needs at iteration k >= 1"""
    if state.pair is None or state.f_prev is None:
        raise CurvatureError("no step pair yet")
    data = SubspaceData.of(state)
    f_prev, f_cur = state.f_prev, state.f
    norm_kind = (
        NormKind.HESSNORM if params.variant is Variant.PR1 else NormKind.EUCLIDNORM
    )
    return Indicators(
        t_k=compute_t(f_prev, f_cur, data.gs, data.sty),
        theta_k=compute_theta(f_prev, f_cur, data.gs, data.sty),
        r_prev=state.r_prev,
        rbar_prev=state.rbar_prev,
        rho_k=compute_rho(data),
        sigma_k=compute_sigma_k(
            params.p,
            f_prev,
            f_cur,
            data.gs,
            data.sty,
            data.ss,
            norm_kind,
            params.euclid_sigma_exponent,
        ),
    )


def quadratic_close(t_k: float, t_prev: float, params: SolverParams) -> bool:
    """f looks quadratic on the last segment, by t_k and t_{k-1}"""
    return t_k <= params.c1_quad or (
        t_k <= params.c2_quad and t_prev <= params.c2_quad
    )


def well_conditioned(data: SubspaceData, params: SolverParams) -> bool:
    """xi1 <= s^T y / ||s||^2 <= ||y||^2 / s^T y <= xi2"""
    if not data.sty > 0:
        return False
    low = data.sty / data.ss
    high = data.yy / data.sty
    return params.xi1 <= low <= high <= params.xi2


def hs_admissible(data: SubspaceData, params: SolverParams) -> bool:
    """The HS direction is close to the quadratic-model direction"""
    if not (data.sty > 0 and data.gg > 0):
        return False
    ratio = abs(data.gy * data.gs) / (data.sty * data.gg)
    return ratio <= params.xi3 and params.xi1 <= data.sty / data.ss


def ill_conditioned(data: SubspaceData, rbar_prev: float) -> bool:
    scale = data.ss * data.yy
    return (
        data.sty**2 <= ILLCOND_CURVATURE * scale
        and rbar_prev**2 <= ILLCOND_TRAPEZOID * scale
    )


def check_conditions(
        state: SolverState,
        indicators: Indicators,
        params: SolverParams,
) -> ModelChoice:
    """Pick one of the four cases for the direction at x_k"""
    data = SubspaceData.of(state)
    if well_conditioned(data, params):
        if quadratic_close(indicators.t_k, state.t_prev, params):
            return ModelChoice(ModelKind.QUAD, Reason.QUAD_T_SMALL)
        if abs(indicators.theta_k - 1.0) < params.gamma:
            return ModelChoice(ModelKind.QUAD, Reason.QUAD_THETA)
        if ill_conditioned(data, indicators.rbar_prev):
            return ModelChoice(ModelKind.QUAD, Reason.QUAD_ILL_CONDITIONED)
        return ModelChoice(ModelKind.PREG, Reason.REGULARIZED)
    if hs_admissible(data, params):
        return ModelChoice(ModelKind.HS, Reason.HS_CONJUGATE)
    return ModelChoice(ModelKind.NEGGRAD, Reason.NEGGRAD_FALLBACK)


def _combine(state: SolverState, mu: float, nu: float) -> Vector:
    assert state.pair is not None
    return mu * state.g + nu * state.pair.s


def direction_quad(state: SolverState, indicators: Indicators) -> Vector:
    """d = mu g + nu s minimizing the quadratic model"""
    data = SubspaceData.of(state)
    rho = indicators.rho_k
    delta = rho * data.sty - data.gy**2
    if not delta > 0:
        raise IndefiniteModelError(f"Delta_k = {delta:g} is not positive")
    mu = (data.gy * data.gs - data.sty * data.gg) / delta
    nu = (data.gy * data.gg - rho * data.gs) / delta
    return _combine(state, mu, nu)


def _subproblem_input(
        state: SolverState,
        indicators: Indicators,
        p: float,
        norm_kind: NormKind,
) -> SubproblemInput:
    assert state.pair is not None
    return SubproblemInput.from_vectors(
        state.g,
        state.pair.s,
        state.pair.y,
        rho=indicators.rho_k,
        sigma=indicators.sigma_k,
        p=p,
        norm_kind=norm_kind,
    )


def direction_preg_hessnorm(
        state: SolverState,
        indicators: Indicators,
        p: float,
) -> Vector:
    """Regularized direction with the Hessian-induced norm (SMCG_PR1)"""
    solution = solve_hessnorm(
        _subproblem_input(state, indicators, p, NormKind.HESSNORM)
    )
    return _combine(state, solution.mu, solution.nu)


def collinear(data: SubspaceData) -> bool:
    """g_k and s_{k-1} may be linearly dependent"""
    return data.gs**2 > (1.0 - COLLINEARITY_MARGIN) * data.gg * data.ss


def direction_preg_euclidnorm(
        state: SolverState,
        indicators: Indicators,
        p: float,
) -> Vector:
    """Regularized direction with the Euclidean norm (SMCG_PR2)"""
    data = SubspaceData.of(state)
    if collinear(data) or indicators.sigma_k == 0:
        # lambda = 0 reduces the formulas to the quadratic model
        return direction_quad(state, indicators)
    solution = solve_euclidnorm(
        _subproblem_input(state, indicators, p, NormKind.EUCLIDNORM),
        curvature_cap=data.yy / data.sty,
    )
    return _combine(state, solution.mu, solution.nu)


def direction_hs(state: SolverState) -> Vector:
    """d = -g + beta_HS d_{k-1}"""
    if state.pair is None:
        raise CurvatureError("no step pair yet")
    denominator = float(state.d @ state.pair.y)
    if denominator == 0:
        raise CurvatureError("d^T y vanished in the HS formula")
    beta = float(state.g @ state.pair.y) / denominator
    return -state.g + beta * state.d


def direction_neggrad(state: SolverState) -> Vector:
    return -state.g


def compute_direction(
        state: SolverState,
        indicators: Indicators,
        choice: ModelChoice,
        params: SolverParams,
) -> tuple[Vector, DirKind]:
    """Dispatch on the model choice; numerical failures give -g"""
    try:
        match choice.kind:
            case ModelKind.PREG if params.variant is Variant.PR1:
                return (
                    direction_preg_hessnorm(state, indicators, params.p),
                    DirKind.PREG_HESSNORM,
                )
            case ModelKind.PREG:
                return (
                    direction_preg_euclidnorm(state, indicators, params.p),
                    DirKind.PREG_EUCLIDNORM,
                )
            case ModelKind.QUAD:
                return direction_quad(state, indicators), DirKind.QUAD
            case ModelKind.HS:
                return direction_hs(state), DirKind.HS
    except (
        IndefiniteModelError,
        CollinearityError,
        CurvatureError,
        NumericError,
    ) as exc:
        logging.warning("k=%d: %s direction failed (%s), using -g",
                        state.k, choice.kind.value, exc)
    return direction_neggrad(state), DirKind.NEGGRAD


def is_descent(g: Vector, d: Vector, params: SolverParams) -> bool:
    """g^T d <= -c ||g||^2 with the shared descent constant"""
    return float(g @ d) <= -descent_constant(params) * float(g @ g)


def within_bound(g: Vector, d: Vector, params: SolverParams) -> bool:
    return float(np.linalg.norm(d)) <= direction_bound_constant(params) * float(
        np.linalg.norm(g)
    )
