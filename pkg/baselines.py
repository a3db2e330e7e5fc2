"""Classical nonlinear conjugate gradient methods, d = -g + beta d_prev.

They run on the same driver, line search and nonmonotone reference as
SMCG_PR, so only the direction differs between compared methods.
"""
import logging
from enum import Enum

import numpy as np

from model_core import DirKind, SolverParams, SolverState
from smcg_protocols import ObjectiveProbe, Vector
from solver import RunRecord, drive

# restart with -g unless g^T d < -DESCENT_TOLERANCE ||g|| ||d||
DESCENT_TOLERANCE = 1e-12


class BetaKind(str, Enum):
    FR = "FR"
    HS = "HS"
    PRP = "PRP"
    DY = "DY"
    HZ = "HZ"


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator != 0 else 0.0


def beta(
        kind: BetaKind,
        g_new: Vector,
        g_old: Vector,
        d_old: Vector,
        y: Vector,
) -> float:
    """The conjugacy parameter; a vanishing denominator gives 0"""
    match kind:
        case BetaKind.FR:
            return _ratio(float(g_new @ g_new), float(g_old @ g_old))
        case BetaKind.HS:
            return _ratio(float(g_new @ y), float(d_old @ y))
        case BetaKind.PRP:
            return _ratio(float(g_new @ y), float(g_old @ g_old))
        case BetaKind.DY:
            return _ratio(float(g_new @ g_new), float(d_old @ y))
        case BetaKind.HZ:
            dty = float(d_old @ y)
            if dty == 0:
                return 0.0
            w = y - 2.0 * d_old * float(y @ y) / dty
            return float(w @ g_new) / dty
    raise ValueError(f"Unknown beta kind {kind!r}")


class BetaPolicy:
    """d_{k+1} = -g_{k+1} + beta_k d_k with a descent safeguard"""

    def __init__(self, kind: BetaKind):
        self.kind = kind

    def checks_lemmas(self) -> bool:
        return False

    def next_direction(
            self,
            state: SolverState,
            params: SolverParams,
    ) -> tuple[Vector, DirKind]:
        g = state.g
        if state.pair is not None and state.g_prev is not None:
            b = beta(self.kind, g, state.g_prev, state.d, state.pair.y)
            d = -g + b * state.d
            if np.all(np.isfinite(d)):
                gtd = float(g @ d)
                if gtd < -DESCENT_TOLERANCE * float(np.linalg.norm(g)) * float(
                    np.linalg.norm(d)
                ):
                    state.numgrad_successive = 0
                    return d, DirKind.CONJUGATE
        logging.debug("k=%d: %s direction restarted with -g", state.k, self.kind.value)
        state.numgrad += 1
        state.numgrad_successive += 1
        return -g, DirKind.NEGGRAD


def run_baseline(
        probe: ObjectiveProbe,
        x0: Vector,
        kind: BetaKind,
        params: SolverParams,
        trace: bool = False,
) -> RunRecord:
    """Run the conjugate gradient method with the given beta formula"""
    return drive(probe, x0, params, BetaPolicy(kind), kind.value.lower(), trace)
