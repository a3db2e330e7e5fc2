"""The iteration driver shared by every method and the SMCG_PR direction rule.

`drive` owns evaluation counting, termination, initial stepsizes, the
nonmonotone line search and the reference value update; a DirectionPolicy
only computes the next search direction.
"""
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from direction import (
    check_conditions,
    compute_direction,
    compute_indicators,
    descent_constant,
    direction_bound_constant,
    direction_neggrad,
    is_descent,
    quadratic_close,
    within_bound,
)
from linesearch import (
    NonmonotoneRef,
    initial_step_conjugate,
    initial_step_neggrad,
    initial_step_subspace,
    q_ceiling,
    segment_t,
    update_nonmonotone,
    wolfe_search,
)
from model_core import (
    CurvatureError,
    DirKind,
    InvariantViolation,
    LineSearchError,
    PairData,
    CountingProbe,
    RunStatus,
    SolverParams,
    SolverState,
    norm_inf,
)
from smcg_protocols import DirectionPolicy, ObjectiveProbe, Vector

# relative slack of the f_k <= C_k check, for rounding in the C update
REFERENCE_SLACK = 1e-12


@dataclass(frozen=True)
class TraceRow:
    """One iteration: the step from x_k along d_k and the reference update"""

    k: int
    f: float
    f_new: float
    gnorm_inf: float
    gnorm: float
    dnorm: float
    gtd: float
    gtd_new: float
    alpha: float
    dir_kind: DirKind
    C: float
    C_new: float
    Q_new: float


@dataclass
class RunRecord:
    """The outcome of one (problem, method) run"""

    problem: str
    n: int
    method: str
    status: RunStatus
    iters: int
    n_f: int
    n_g: int
    time_s: float
    final_f: float
    final_gnorm_inf: float
    dir_kind_histogram: dict[str, int] = field(default_factory=dict, compare=False)
    trace: list[TraceRow] = field(default_factory=list, compare=False, repr=False)


def restart_quantities(
        f_prev: float,
        f_cur: float,
        g_prev: Vector,
        g_cur: Vector,
        s: Vector,
) -> tuple[float, float]:
    """How well the trapezoid rule predicts f on the last segment.

    Returns (r, rbar); r is inf when its denominator vanishes.
    """
    trapezoid = 0.5 * (float(g_prev @ s) + float(g_cur @ s))
    denominator = f_prev + trapezoid
    r = math.inf if denominator == 0 else abs(f_cur / denominator - 1.0)
    rbar = abs(f_cur - f_prev - trapezoid)
    return r, rbar


class SmcgPolicy:
    """The SMCG_PR direction rule: restart counters, then one of four cases"""

    def checks_lemmas(self) -> bool:
        return True

    def _restart(self, state: SolverState) -> tuple[Vector, DirKind]:
        state.numgrad += 1
        state.numgrad_successive += 1
        state.isnotgra = 0
        state.iter_restart = 0
        return direction_neggrad(state), DirKind.NEGGRAD

    def next_direction(
            self,
            state: SolverState,
            params: SolverParams,
    ) -> tuple[Vector, DirKind]:
        state.iter_restart += 1
        if state.r_prev <= params.xi4 or state.rbar_prev <= params.xi5:
            state.iter_quad += 1
        else:
            state.iter_quad = 0
        if state.isnotgra >= params.restart_threshold(state.n) or (
            state.iter_quad == params.min_quad
            and state.iter_restart != state.iter_quad
        ):
            logging.debug("k=%d: restart with -g", state.k)
            return self._restart(state)
        # one dimension leaves no two-dimensional subspace
        if state.n == 1 or state.pair is None or not state.pair.sty > 0:
            return self._restart(state)
        try:
            indicators = compute_indicators(state, params)
        except CurvatureError as exc:
            logging.warning("k=%d: %s, using -g", state.k, exc)
            return self._restart(state)
        choice = check_conditions(state, indicators, params)
        d, kind = compute_direction(state, indicators, choice, params)
        if kind is DirKind.NEGGRAD:
            return self._restart(state)
        state.isnotgra += 1
        state.numgrad_successive = 0
        return d, kind


def _initial_step(
        probe: ObjectiveProbe,
        state: SolverState,
        params: SolverParams,
) -> float:
    match state.dir_kind:
        case DirKind.NEGGRAD:
            return initial_step_neggrad(probe, state, params, state.numgrad_successive)
        case DirKind.CONJUGATE:
            return initial_step_conjugate(probe, state, params)
        case _:
            return initial_step_subspace(
                probe, state.x, state.f, state.g, state.d, state.quad_close, params
            )


def _check_direction(state: SolverState, params: SolverParams) -> None:
    if not is_descent(state.g, state.d, params):
        raise InvariantViolation(
            f"k={state.k}: {state.dir_kind.value} direction violates "
            f"g^T d <= -{descent_constant(params):g} ||g||^2"
        )
    if state.dir_kind is not DirKind.HS and not within_bound(state.g, state.d, params):
        raise InvariantViolation(
            f"k={state.k}: ||d|| exceeds {direction_bound_constant(params):g} ||g||"
        )


def _check_reference(k: int, f_new: float, ref: NonmonotoneRef) -> None:
    if f_new - ref.C > REFERENCE_SLACK * max(1.0, abs(ref.C)):
        raise InvariantViolation(f"k={k}: f = {f_new!r} exceeds C = {ref.C!r}")
    if ref.Q > q_ceiling(ref.l):
        raise InvariantViolation(f"k={k}: Q = {ref.Q:g} exceeds its ceiling")


def drive(
        probe: ObjectiveProbe,
        x0: Vector,
        params: SolverParams,
        policy: DirectionPolicy,
        method: str,
        trace: bool = False,
) -> RunRecord:
    """Run one method from x0 until ||g||_inf <= eps or a failure"""
    params.validate()
    counting = CountingProbe(probe)
    started = time.perf_counter()
    histogram: Counter[str] = Counter()
    rows: list[TraceRow] = []

    x = np.array(x0, dtype=np.float64)
    f = counting.eval_f(x)
    g = counting.eval_grad(x)

    def record(status: RunStatus, state: Optional[SolverState]) -> RunRecord:
        elapsed = time.perf_counter() - started
        iters = state.k if state else 0
        final_f = state.f if state else f
        final_g = state.g if state else g
        logging.debug("%s on %s: %s after %d iterations",
                      method, probe.name, status.value, iters)
        return RunRecord(
            problem=probe.name,
            n=x.shape[0],
            method=method,
            status=status,
            iters=iters,
            n_f=counting.n_f,
            n_g=counting.n_g,
            time_s=elapsed,
            final_f=final_f,
            final_gnorm_inf=norm_inf(final_g),
            dir_kind_histogram=dict(histogram),
            trace=rows,
        )

    if not (math.isfinite(f) and np.all(np.isfinite(g))):
        logging.warning("%s: non-finite value at the starting point", probe.name)
        return record(RunStatus.EVAL_FAIL, None)

    ref = NonmonotoneRef.start(f, x.shape[0])
    state = SolverState(k=0, x=x, g=g, f=f, d=-g, C=ref.C, Q=ref.Q)
    logging.debug("%s on %s: n=%d f0=%g", method, probe.name, state.n, f)
    check = params.check_invariants and policy.checks_lemmas()

    while True:
        if norm_inf(state.g) <= params.eps:
            return record(RunStatus.CONVERGED, state)
        if state.k >= params.max_iter:
            return record(RunStatus.MAX_ITER, state)
        gtd = float(state.g @ state.d)
        if not gtd < 0:
            logging.warning("k=%d: %s direction is not a descent direction, using -g",
                            state.k, state.dir_kind.value)
            state.d, state.dir_kind = direction_neggrad(state), DirKind.NEGGRAD
            gtd = float(state.g @ state.d)
        if check:
            _check_direction(state, params)

        alpha0 = _initial_step(counting, state, params)
        try:
            step = wolfe_search(
                counting, state.x, state.f, state.g, state.d, alpha0, ref.C, params
            )
        except LineSearchError as exc:
            logging.warning("%s on %s, k=%d: %s", method, probe.name, state.k, exc)
            return record(RunStatus.LINE_SEARCH_FAIL, state)
        if not np.all(np.isfinite(step.g_new)):
            return record(RunStatus.EVAL_FAIL, state)

        new_ref = update_nonmonotone(ref, step.f_new, params)
        histogram[state.dir_kind.value] += 1
        if trace:
            rows.append(
                TraceRow(
                    k=state.k,
                    f=state.f,
                    f_new=step.f_new,
                    gnorm_inf=norm_inf(state.g),
                    gnorm=float(np.linalg.norm(state.g)),
                    dnorm=float(np.linalg.norm(state.d)),
                    gtd=gtd,
                    gtd_new=float(step.g_new @ state.d),
                    alpha=step.alpha,
                    dir_kind=state.dir_kind,
                    C=ref.C,
                    C_new=new_ref.C,
                    Q_new=new_ref.Q,
                )
            )
        if params.check_invariants:
            _check_reference(state.k, step.f_new, new_ref)
        ref = new_ref

        s = step.alpha * state.d
        x_new = state.x + s
        r, rbar = restart_quantities(state.f, step.f_new, state.g, step.g_new, s)
        state.f_prev, state.g_prev = state.f, state.g
        state.x, state.f, state.g = x_new, step.f_new, step.g_new
        state.pair = PairData.from_vectors(s, step.g_new - state.g_prev)
        state.r_prev, state.rbar_prev = r, rbar
        state.alpha_prev = step.alpha
        state.C, state.Q = ref.C, ref.Q
        state.k += 1
        if norm_inf(state.g) <= params.eps:
            return record(RunStatus.CONVERGED, state)

        t_k = segment_t(state)
        state.quad_close = quadratic_close(t_k, state.t_prev, params)
        d, kind = policy.next_direction(state, params)
        state.t_prev = t_k
        state.prev_dir_kind = state.dir_kind
        state.d, state.dir_kind = d, kind


def method_name(params: SolverParams) -> str:
    return f"smcg_{params.variant.value.lower()}"


def run(
        probe: ObjectiveProbe,
        x0: Vector,
        params: SolverParams,
        trace: bool = False,
        method: Optional[str] = None,
) -> RunRecord:
    """Run SMCG_PR1 or SMCG_PR2, as selected by params.variant"""
    return drive(probe, x0, params, SmcgPolicy(), method or method_name(params), trace)


def verify_trace(record: RunRecord, params: SolverParams) -> list[str]:
    """Re-check a traced run offline, returning one message per violation"""
    violations = []
    c1 = descent_constant(params)
    bound = direction_bound_constant(params)
    ceiling = q_ceiling(max(20, record.n))
    for row in record.trace:
        if row.f_new > row.C + params.delta * row.alpha * row.gtd:
            violations.append(f"k={row.k}: sufficient decrease fails")
        if row.gtd_new < params.sigma * row.gtd:
            violations.append(f"k={row.k}: curvature condition fails")
        if row.dir_kind is not DirKind.CONJUGATE:
            if row.gtd > -c1 * row.gnorm**2:
                violations.append(f"k={row.k}: {row.dir_kind.value} is not sufficiently descending")
            if row.dir_kind is not DirKind.HS and row.dnorm > bound * row.gnorm:
                violations.append(f"k={row.k}: {row.dir_kind.value} exceeds the direction bound")
        if row.f_new - row.C_new > REFERENCE_SLACK * max(1.0, abs(row.C_new)):
            violations.append(f"k={row.k}: f exceeds the reference value")
        if row.Q_new > ceiling:
            violations.append(f"k={row.k}: Q exceeds {ceiling:g}")
    return violations
