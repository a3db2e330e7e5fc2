from typing import Protocol, TYPE_CHECKING

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from model_core import DirKind, SolverParams, SolverState

Vector = npt.NDArray[np.float64]


class ObjectiveProbe(Protocol):
    """The evaluation interface of a smooth objective function.

    Implementations must be re-entrant: no mutable state is shared between
    calls, so one probe may serve several solver runs at the same time.
    """

    name: str
    dim: int

    def eval_f(self, x: Vector) -> float:
        """Evaluates the objective at x"""

    def eval_grad(self, x: Vector) -> Vector:
        """Evaluates the gradient at x"""


class DirectionPolicy(Protocol):
    """The protocol of a search direction rule driven by `solver.drive`."""

    def next_direction(
            self,
            state: "SolverState",
            params: "SolverParams",
    ) -> tuple[Vector, "DirKind"]:
        """Computes d_{k+1} at the point already stored in the state.

        The state holds the new point, the pair (s_k, y_k) and the restart
        counters; the policy may update the counters in place.
        """

    def checks_lemmas(self) -> bool:
        """Whether the sufficient descent and direction bounds apply"""
