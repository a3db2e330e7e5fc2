"""Nonmonotone Wolfe line search and the initial stepsize rules."""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from direction import compute_t
from model_core import (
    CurvatureError,
    DirKind,
    DomainError,
    LineSearchError,
    SolverParams,
    SolverState,
)
from smcg_protocols import ObjectiveProbe, Vector

MAX_EVALUATIONS = 60
ETA_DECREASE = 0.7
ETA_DEFAULT = 0.999
# fraction of the bracket kept clear of its ends by interpolated trials
SAFEGUARD = 0.1
EXPANSION = 10.0
# first trial as a fraction of the previous step, and the fallback growth,
# for the beta-rule directions
QUAD_TRIAL = 0.1
STEP_GROWTH = 2.0


@dataclass(frozen=True)
class NonmonotoneRef:
    """The reference value C_k and weight Q_k of the Armijo test"""

    C: float
    Q: float
    l: int
    k: int = 0

    @classmethod
    def start(cls, f0: float, n: int) -> "NonmonotoneRef":
        return cls(C=f0, Q=1.0, l=max(20, n), k=0)


def q_ceiling(l: int) -> float:
    """Upper bound of Q_k over a run, 1 + (l + 1) / (1 - eta)"""
    return 1.0 + (l + 1) / (1.0 - ETA_DEFAULT)


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    f_new: float
    g_new: Vector
    n_f: int
    n_g: int


def update_nonmonotone(
        ref: NonmonotoneRef,
        f_new: float,
        params: Optional[SolverParams] = None,
        eta_k: Optional[float] = None,
) -> NonmonotoneRef:
    """Fold f_{k+1} into (C, Q); eta_k overrides the adaptive weight"""
    if ref.k == 0 and eta_k is None:
        return replace(ref, C=min(ref.C, f_new + 1.0), Q=2.0, k=1)
    if eta_k is None:
        if ref.k % ref.l == 0:
            decreased = ref.C - f_new > 0.999 * abs(ref.C)
            eta_k = ETA_DECREASE if decreased else ETA_DEFAULT
        else:
            eta_k = 1.0
    Q = eta_k * ref.Q + 1.0
    C = (eta_k * ref.Q * ref.C + f_new) / Q
    return replace(ref, C=C, Q=Q, k=ref.k + 1)


def clamp_step(alpha: float, params: SolverParams) -> float:
    return min(max(alpha, params.lambda_min), params.lambda_max)


def interpolated_minimizer(
        phi0: float,
        dphi0: float,
        alpha: float,
        phi_alpha: float,
) -> Optional[float]:
    """Minimizer of the quadratic through phi(0), phi'(0) and phi(alpha).

    None when the quadratic is not strictly convex.
    """
    curvature = (phi_alpha - phi0 - dphi0 * alpha) / (alpha * alpha)
    if not curvature > 0:
        return None
    return -dphi0 / (2.0 * curvature)


def _evaluate_f(probe: ObjectiveProbe, x: Vector) -> float:
    value = probe.eval_f(x)
    return value if math.isfinite(value) else math.inf


def wolfe_search(
        probe: ObjectiveProbe,
        x: Vector,
        f: float,
        g: Vector,
        d: Vector,
        alpha0: float,
        C: float,
        params: SolverParams,
) -> LineSearchResult:
    """Find alpha with

        f(x + alpha d) <= C + delta alpha g^T d,
        grad f(x + alpha d)^T d >= sigma g^T d.

    A trial that fails the first test bounds the step from above, one that
    fails the second from below; trials inside a bracket come from
    safeguarded quadratic interpolation.
    """
    gtd = float(g @ d)
    if not gtd < 0:
        raise DomainError(f"d is not a descent direction (g^T d = {gtd:g})")
    n_f = n_g = 0
    lo, f_lo, dphi_lo = 0.0, f, gtd
    hi, f_hi = math.inf, math.inf
    alpha = clamp_step(alpha0, params)
    while n_f < MAX_EVALUATIONS:
        x_new = x + alpha * d
        f_new = _evaluate_f(probe, x_new)
        n_f += 1
        if f_new > C + params.delta * alpha * gtd:
            hi, f_hi = alpha, f_new
        else:
            g_new = np.asarray(probe.eval_grad(x_new), dtype=np.float64)
            n_g += 1
            dphi = float(g_new @ d)
            if not math.isfinite(dphi):
                hi, f_hi = alpha, math.inf
            elif dphi >= params.sigma * gtd:
                return LineSearchResult(alpha, f_new, g_new, n_f, n_g)
            else:
                lo, f_lo, dphi_lo = alpha, f_new, dphi
        if math.isinf(hi):
            if lo >= params.lambda_max:
                break
            alpha = min(EXPANSION * lo, params.lambda_max)
            continue
        width = hi - lo
        trial = None
        if math.isfinite(f_hi):
            step = interpolated_minimizer(f_lo, dphi_lo, width, f_hi)
            if step is not None:
                trial = lo + step
        if trial is None or not (
            lo + SAFEGUARD * width <= trial <= hi - SAFEGUARD * width
        ):
            trial = lo + 0.5 * width
        alpha = trial
        if alpha < params.lambda_min:
            break
    logging.debug("line search failed after %d evaluations (alpha=%g)", n_f, alpha)
    raise LineSearchError(
        f"no Wolfe step after {n_f} function evaluations (last alpha {alpha:g})"
    )


def initial_step_subspace(
        probe: ObjectiveProbe,
        x: Vector,
        f: float,
        g: Vector,
        d: Vector,
        quad_close: bool,
        params: SolverParams,
) -> float:
    """Initial trial step for the subspace and HS directions"""
    if not quad_close:
        return 1.0
    phi1 = probe.eval_f(x + d)
    if not math.isfinite(phi1):
        return 1.0
    step = interpolated_minimizer(f, float(g @ d), 1.0, phi1)
    if step is None or not step > 0:
        return 1.0
    return clamp_step(step, params)


def initial_step_neggrad(
        probe: ObjectiveProbe,
        state: SolverState,
        params: SolverParams,
        numgra: int,
) -> float:
    """Adaptive Barzilai-Borwein step for d = -g"""
    gnorm = float(np.linalg.norm(state.g))
    pair = state.pair
    if pair is None:
        return clamp_step(params.first_step, params)
    if not pair.sty > 0:
        return clamp_step(1.0 / gnorm, params)
    scaling = 0.999 if state.n > 10 and numgra > 12 else 1.0
    if float(state.g @ pair.s) > 0:
        base = pair.sty / pair.yy
    else:
        base = pair.ss / pair.sty
    alpha = clamp_step(scaling * base, params)
    if (
        state.quad_close
        and state.prev_dir_kind is not DirKind.NEGGRAD
        and gnorm * gnorm <= 1.0
    ):
        d = -state.g
        phi_alpha = probe.eval_f(state.x + alpha * d)
        if math.isfinite(phi_alpha):
            step = interpolated_minimizer(state.f, -gnorm * gnorm, alpha, phi_alpha)
            if step is not None and step > 0:
                return clamp_step(step, params)
    return alpha


def initial_step_conjugate(
        probe: ObjectiveProbe,
        state: SolverState,
        params: SolverParams,
) -> float:
    """Initial trial step for the beta-rule directions.

    Minimizes the quadratic through phi(0), phi'(0) and phi at a tenth of
    the previous step when phi decreased there, else doubles that step.
    """
    trial = QUAD_TRIAL * state.alpha_prev
    phi = probe.eval_f(state.x + trial * state.d)
    if math.isfinite(phi) and phi <= state.f:
        step = interpolated_minimizer(state.f, float(state.g @ state.d), trial, phi)
        if step is not None and step > 0:
            return clamp_step(step, params)
    return clamp_step(STEP_GROWTH * state.alpha_prev, params)


def segment_t(state: SolverState) -> float:
    """t_k of the last segment, inf when it is undefined"""
    if state.pair is None or state.f_prev is None:
        return math.inf
    try:
        return compute_t(state.f_prev, state.f, float(state.g @ state.pair.s),
                         state.pair.sty)
    except CurvatureError:
        return math.inf
