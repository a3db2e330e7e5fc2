"""Shared domain types, solver parameters and the evaluation plumbing."""
import json
import logging
import math
from dataclasses import dataclass, field, fields, asdict, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from smcg_protocols import ObjectiveProbe, Vector


class SmcgError(Exception):
    """Base class of every error raised by this package"""


class ConfigError(SmcgError, ValueError):
    """Invalid parameters, configuration keys or names"""


class DomainError(SmcgError, ValueError):
    """An argument lies outside the domain of an operation"""


class EvaluationError(SmcgError):
    """The objective or its gradient returned a non-finite value"""


class CurvatureError(SmcgError):
    """The curvature information of the last step is unusable"""


class IndefiniteModelError(SmcgError):
    """The 2x2 model matrix is not positive definite"""


class CollinearityError(SmcgError):
    """g and s are numerically collinear, E is not positive definite"""


class NumericError(SmcgError):
    """An iterative numerical kernel failed"""


class UnsupportedHardCaseError(NumericError):
    """The shifted model matrix is singular with a vanishing projection"""


class LineSearchError(SmcgError):
    """No stepsize satisfying the Wolfe conditions was found"""


class InvariantViolation(SmcgError):
    """A runtime-checked property of the method does not hold"""


class EmitError(SmcgError, OSError):
    """Results could not be written"""


class Variant(str, Enum):
    PR1 = "PR1"
    PR2 = "PR2"


class NormKind(str, Enum):
    HESSNORM = "HESSNORM"
    EUCLIDNORM = "EUCLIDNORM"


class DirKind(str, Enum):
    PREG_HESSNORM = "PREG_HESSNORM"
    PREG_EUCLIDNORM = "PREG_EUCLIDNORM"
    QUAD = "QUAD"
    HS = "HS"
    NEGGRAD = "NEGGRAD"
    # beta-formula directions of the baseline methods
    CONJUGATE = "CONJUGATE"


class RunStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    LINE_SEARCH_FAIL = "LineSearchFail"
    EVAL_FAIL = "EvalFail"


@dataclass(frozen=True)
class SolverParams:
    """Parameters of the SMCG_PR methods.

    The defaults are the values of the numerical experiments; max_restart,
    restart_per_dim and min_quad have no published value and are exposed
    for tuning. first_step is the trial step of the first iteration.
    """

    eps: float = 1e-6
    delta: float = 0.0005
    sigma: float = 0.9999
    lambda_min: float = 1e-30
    lambda_max: float = 1e30
    gamma: float = 1e-5
    xi1: float = 1e-7
    xi2: float = 1.25e4
    xi3: float = 1e-5
    xi4: float = 1e-9
    xi5: float = 1e-11
    c1_quad: float = 1e-4
    c2_quad: float = 0.080
    p: float = 3.0
    max_iter: int = 200_000
    max_restart: int = 11
    restart_per_dim: int = 4
    min_quad: int = 3
    first_step: float = 1.0
    variant: Variant = Variant.PR1
    euclid_sigma_exponent: str = "half"
    check_invariants: bool = False

    def validate(self) -> "SolverParams":
        """Check the parameter invariants, returning self when they hold"""
        checks = (
            (0 < self.delta < self.sigma < 1, "need 0 < delta < sigma < 1"),
            (
                0 < self.lambda_min < self.lambda_max,
                "need 0 < lambda_min < lambda_max",
            ),
            (0 <= self.xi3 <= 1, "need 0 <= xi3 <= 1"),
            (self.xi1 > 0, "need xi1 > 0"),
            (self.xi2 > self.xi1, "need xi2 > xi1"),
            (self.xi4 > 0 and self.xi5 > 0, "need xi4, xi5 > 0"),
            (self.eps > 0, "need eps > 0"),
            (self.gamma > 0, "need gamma > 0"),
            (0 < self.c1_quad and 0 < self.c2_quad, "need c1_quad, c2_quad > 0"),
            (self.p > 2, "need p > 2"),
            (self.max_iter >= 0, "need max_iter >= 0"),
            (self.max_restart > 0 and self.min_quad > 0,
             "need positive max_restart and min_quad"),
            (self.restart_per_dim >= 0, "need restart_per_dim >= 0"),
            (self.first_step > 0, "need first_step > 0"),
            (
                self.euclid_sigma_exponent in ("half", "full"),
                "euclid_sigma_exponent must be 'half' or 'full'",
            ),
        )
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def restart_threshold(self, n: int) -> int:
        """Successive non-gradient directions allowed before a restart with -g"""
        return max(self.max_restart, self.restart_per_dim * n)


_ENUM_FIELDS = {"variant": Variant}


def params_to_mapping(params: SolverParams) -> dict[str, Any]:
    """Serialise the parameters to plain JSON types"""
    out = asdict(params)
    for key, enum_type in _ENUM_FIELDS.items():
        out[key] = enum_type(out[key]).value
    return out


def params_from_mapping(
        mapping: Mapping[str, Any],
        base: Optional[SolverParams] = None,
) -> SolverParams:
    """Apply a mapping of field names onto base (or the defaults)"""
    known = {f.name: f for f in fields(SolverParams)}
    unknown = sorted(set(mapping) - set(known))
    if unknown:
        raise ConfigError(f"Unknown parameter(s): {', '.join(unknown)}")
    changes: dict[str, Any] = {}
    for key, value in mapping.items():
        if key in _ENUM_FIELDS:
            try:
                value = _ENUM_FIELDS[key](str(value).upper())
            except ValueError as exc:
                raise ConfigError(f"Bad value for {key}: {value!r}") from exc
        elif known[key].type is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"{key} must be true or false, got {value!r}")
        elif known[key].type is int:
            if isinstance(value, float) and not value.is_integer():
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            value = int(value)
        elif known[key].type is float:
            value = float(value)
        changes[key] = value
    return replace(base or SolverParams(), **changes).validate()


def load_params(path: str | Path, base: Optional[SolverParams] = None) -> SolverParams:
    """Load a JSON configuration file of SolverParams fields"""
    try:
        with open(path, encoding="utf-8") as fh:
            mapping = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read configuration {path}: {exc}") from exc
    if not isinstance(mapping, dict):
        raise ConfigError(f"Configuration {path} must hold a JSON object")
    logging.debug("Loaded %d parameter(s) from %s", len(mapping), path)
    return params_from_mapping(mapping, base)


def dump_params(params: SolverParams, path: str | Path) -> None:
    """Write the parameters as a JSON configuration file"""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(params_to_mapping(params), fh, indent=2)
    except OSError as exc:
        raise EmitError(f"Cannot write configuration {path}: {exc}") from exc


@dataclass(frozen=True)
class PairData:
    """The last step s = x_k - x_{k-1} and gradient change y = g_k - g_{k-1}"""

    s: Vector
    y: Vector
    sty: float
    ss: float
    yy: float

    @classmethod
    def from_vectors(cls, s: Vector, y: Vector) -> "PairData":
        return cls(
            s=s,
            y=y,
            sty=float(s @ y),
            ss=float(s @ s),
            yy=float(y @ y),
        )


@dataclass
class SolverState:
    """Everything one run carries from one iteration to the next"""

    k: int
    x: Vector
    g: Vector
    f: float
    d: Vector
    pair: Optional[PairData] = None
    C: float = 0.0
    Q: float = 1.0
    t_prev: float = math.inf
    iter_restart: int = 0
    iter_quad: int = 0
    isnotgra: int = 0
    numgrad: int = 0
    numgrad_successive: int = 0
    dir_kind: DirKind = DirKind.NEGGRAD
    prev_dir_kind: DirKind = DirKind.NEGGRAD
    f_prev: Optional[float] = None
    g_prev: Optional[Vector] = None
    r_prev: float = math.inf
    rbar_prev: float = math.inf
    quad_close: bool = False
    alpha_prev: float = 1.0

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass
class CountingProbe:
    """Wraps a probe and counts its evaluations for one run"""

    probe: ObjectiveProbe
    n_f: int = field(default=0)
    n_g: int = field(default=0)

    @property
    def name(self) -> str:
        return self.probe.name

    @property
    def dim(self) -> int:
        return self.probe.dim

    def eval_f(self, x: Vector) -> float:
        self.n_f += 1
        return float(self.probe.eval_f(x))

    def eval_grad(self, x: Vector) -> Vector:
        self.n_g += 1
        return np.asarray(self.probe.eval_grad(x), dtype=np.float64)


def finite_difference_check(
        probe: ObjectiveProbe,
        x: Vector,
        h: float = 1e-6,
) -> float:
    """Compare the analytic gradient with central differences of eval_f.

    Coordinate i uses the step h * max(1, |x_i|). Returns the largest
    |fd_i - g_i| / max(1, |g_i|).
    """
    if not h > 0:
        raise DomainError(f"Finite difference step must be positive, got {h}")
    x = np.asarray(x, dtype=np.float64)
    f0 = probe.eval_f(x)
    g = np.asarray(probe.eval_grad(x), dtype=np.float64)
    if not (math.isfinite(f0) and np.all(np.isfinite(g))):
        raise EvaluationError(f"{probe.name}: non-finite value at the check point")
    worst = 0.0
    xt = x.copy()
    for i in range(x.shape[0]):
        step = h * max(1.0, abs(x[i]))
        xt[i] = x[i] + step
        f_plus = probe.eval_f(xt)
        xt[i] = x[i] - step
        f_minus = probe.eval_f(xt)
        xt[i] = x[i]
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise EvaluationError(
                f"{probe.name}: non-finite value near coordinate {i}"
            )
        fd = (f_plus - f_minus) / (2.0 * step)
        worst = max(worst, abs(fd - g[i]) / max(1.0, abs(g[i])))
    return worst


def norm_inf(v: Vector) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0
