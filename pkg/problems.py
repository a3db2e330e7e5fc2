"""Unconstrained test problems with analytic gradients.

Hand translations of CUTEr/SIF problems and of the classical More, Garbow
and Hillstrom functions. Every objective is vectorised with numpy and costs
O(n) time and memory. Sources:

- the SIF files: https://bitbucket.org/optrove/sif/src/master/
- AMPL versions: https://vanderbei.princeton.edu/ampl/nlmodels/cute/index.html

EIGENBLS is not included. Problems with a `reference` carry the iteration,
function and gradient counts SMCG_PR1 (p = 3) needs on the CUTEr originals.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from model_core import ConfigError
from smcg_protocols import Vector

ArrayFunction = Callable[[Vector], float]
GradFunction = Callable[[Vector], Vector]


class Tag(str, Enum):
    ILLCONDITIONED = "illconditioned"
    CONVEX = "convex"
    NONCONVEX = "nonconvex"


@dataclass(frozen=True)
class Problem:
    """One instance of a test problem, an ObjectiveProbe"""

    name: str
    dim: int
    f: ArrayFunction
    grad: GradFunction

    def eval_f(self, x: Vector) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            return float(self.f(x))

    def eval_grad(self, x: Vector) -> Vector:
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self.grad(x), dtype=np.float64)


@dataclass(frozen=True)
class ProblemSpec:
    """A registered problem family and its standard starting point"""

    name: str
    dim: int
    start: Callable[[int], Vector]
    f: ArrayFunction
    grad: GradFunction
    tags: frozenset[Tag]
    source: str
    f_star: Optional[float] = None
    scalable: bool = False
    min_dim: int = 1
    dim_multiple: int = 1
    # SMCG_PR1 (p = 3) iterations, f and g evaluations published for CUTEr
    reference: Optional[tuple[int, int, int]] = None

    def with_dim(self, dim: int) -> "ProblemSpec":
        if dim == self.dim:
            return self
        if not self.scalable:
            raise ConfigError(f"{self.name} has the fixed dimension {self.dim}")
        if dim < self.min_dim or dim % self.dim_multiple:
            raise ConfigError(
                f"{self.name} needs a dimension >= {self.min_dim} "
                f"divisible by {self.dim_multiple}, got {dim}"
            )
        return replace(self, dim=dim)

    def x0(self) -> Vector:
        return np.asarray(self.start(self.dim), dtype=np.float64)

    def probe(self) -> Problem:
        return Problem(name=self.name, dim=self.dim, f=self.f, grad=self.grad)


def _filled(value: float) -> Callable[[int], Vector]:
    return lambda n: np.full(n, value, dtype=np.float64)


def _tiled(*values: float) -> Callable[[int], Vector]:
    return lambda n: np.tile(np.asarray(values, dtype=np.float64), n // len(values))


def sphere(x):
    return 0.5 * float(x @ x)


def sphere_grad(x):
    return x.copy()


def rosenbrock(x):
    a, b = x[0::2], x[1::2]
    return float(np.sum(100.0 * (b - a**2) ** 2 + (1.0 - a) ** 2))


def rosenbrock_grad(x):
    a, b = x[0::2], x[1::2]
    t = b - a**2
    g = np.empty_like(x)
    g[0::2] = -400.0 * a * t - 2.0 * (1.0 - a)
    g[1::2] = 200.0 * t
    return g


def genrose(x):
    t = x[1:] - x[:-1] ** 2
    return 1.0 + float(np.sum(100.0 * t**2 + (x[1:] - 1.0) ** 2))


def genrose_grad(x):
    t = x[1:] - x[:-1] ** 2
    g = np.zeros_like(x)
    g[1:] += 200.0 * t + 2.0 * (x[1:] - 1.0)
    g[:-1] -= 400.0 * x[:-1] * t
    return g


def extrosnb(x):
    t = x[1:] - x[:-1] ** 2
    return float((x[0] + 1.0) ** 2 + np.sum(100.0 * t**2))


def extrosnb_grad(x):
    t = x[1:] - x[:-1] ** 2
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] + 1.0)
    g[1:] += 200.0 * t
    g[:-1] -= 400.0 * x[:-1] * t
    return g


def dixon_price(x):
    i = np.arange(2, x.shape[0] + 1)
    t = 2.0 * x[1:] ** 2 - x[:-1]
    return float((x[0] - 1.0) ** 2 + np.sum(i * t**2))


def dixon_price_grad(x):
    i = np.arange(2, x.shape[0] + 1)
    t = 2.0 * x[1:] ** 2 - x[:-1]
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:] += 8.0 * i * t * x[1:]
    g[:-1] -= 2.0 * i * t
    return g


def _trigonometric_residuals(x):
    n = x.shape[0]
    i = np.arange(1, n + 1)
    return n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)


def trigonometric(x):
    r = _trigonometric_residuals(x)
    return float(r @ r)


def trigonometric_grad(x):
    r = _trigonometric_residuals(x)
    i = np.arange(1, x.shape[0] + 1)
    return 2.0 * np.sin(x) * np.sum(r) + 2.0 * r * (i * np.sin(x) - np.cos(x))


def wood(x):
    x1, x2, x3, x4 = x
    return float(
        100.0 * (x2 - x1**2) ** 2
        + (1.0 - x1) ** 2
        + 90.0 * (x4 - x3**2) ** 2
        + (1.0 - x3) ** 2
        + 10.1 * ((x2 - 1.0) ** 2 + (x4 - 1.0) ** 2)
        + 19.8 * (x2 - 1.0) * (x4 - 1.0)
    )


def wood_grad(x):
    x1, x2, x3, x4 = x
    return np.array(
        [
            -400.0 * x1 * (x2 - x1**2) - 2.0 * (1.0 - x1),
            200.0 * (x2 - x1**2) + 20.2 * (x2 - 1.0) + 19.8 * (x4 - 1.0),
            -360.0 * x3 * (x4 - x3**2) - 2.0 * (1.0 - x3),
            180.0 * (x4 - x3**2) + 20.2 * (x4 - 1.0) + 19.8 * (x2 - 1.0),
        ]
    )


BEALE_CONSTANTS = np.array([1.5, 2.25, 2.625])
BEALE_POWERS = np.array([1.0, 2.0, 3.0])


def beale(x):
    u, v = x
    r = BEALE_CONSTANTS - u * (1.0 - v**BEALE_POWERS)
    return float(r @ r)


def beale_grad(x):
    u, v = x
    r = BEALE_CONSTANTS - u * (1.0 - v**BEALE_POWERS)
    dr_du = -(1.0 - v**BEALE_POWERS)
    dr_dv = u * BEALE_POWERS * v ** (BEALE_POWERS - 1.0)
    return np.array([2.0 * r @ dr_du, 2.0 * r @ dr_dv])


def powellsg(x):
    x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
    return float(
        np.sum(
            (x1 + 10.0 * x2) ** 2
            + 5.0 * (x3 - x4) ** 2
            + (x2 - 2.0 * x3) ** 4
            + 10.0 * (x1 - x4) ** 4
        )
    )


def powellsg_grad(x):
    x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
    a, b = x1 + 10.0 * x2, x3 - x4
    c, e = x2 - 2.0 * x3, x1 - x4
    g = np.empty_like(x)
    g[0::4] = 2.0 * a + 40.0 * e**3
    g[1::4] = 20.0 * a + 4.0 * c**3
    g[2::4] = 10.0 * b - 8.0 * c**3
    g[3::4] = -10.0 * b - 40.0 * e**3
    return g


def _freudenstein_roth_residuals(x):
    u, v = x[0::2], x[1::2]
    r1 = -13.0 + u + ((5.0 - v) * v - 2.0) * v
    r2 = -29.0 + u + ((v + 1.0) * v - 14.0) * v
    return r1, r2


def freudenstein_roth(x):
    r1, r2 = _freudenstein_roth_residuals(x)
    return float(np.sum(r1**2 + r2**2))


def freudenstein_roth_grad(x):
    v = x[1::2]
    r1, r2 = _freudenstein_roth_residuals(x)
    g = np.empty_like(x)
    g[0::2] = 2.0 * (r1 + r2)
    g[1::2] = 2.0 * r1 * (10.0 * v - 3.0 * v**2 - 2.0) + 2.0 * r2 * (
        3.0 * v**2 + 2.0 * v - 14.0
    )
    return g


def diagquad(x):
    i = np.arange(1, x.shape[0] + 1)
    return 0.5 * float(np.sum(i * x**2))


def diagquad_grad(x):
    return np.arange(1, x.shape[0] + 1) * x


def tridia(x):
    i = np.arange(2, x.shape[0] + 1)
    t = 2.0 * x[1:] - x[:-1]
    return float((x[0] - 1.0) ** 2 + np.sum(i * t**2))


def tridia_grad(x):
    i = np.arange(2, x.shape[0] + 1)
    t = 2.0 * x[1:] - x[:-1]
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:] += 4.0 * i * t
    g[:-1] -= 2.0 * i * t
    return g


def arwhead(x):
    t = x[:-1] ** 2 + x[-1] ** 2
    return float(np.sum(-4.0 * x[:-1] + 3.0 + t**2))


def arwhead_grad(x):
    t = x[:-1] ** 2 + x[-1] ** 2
    g = np.empty_like(x)
    g[:-1] = -4.0 + 4.0 * x[:-1] * t
    g[-1] = 4.0 * x[-1] * np.sum(t)
    return g


def dqdrtic(x):
    return float(np.sum(x[:-2] ** 2 + 100.0 * x[1:-1] ** 2 + 100.0 * x[2:] ** 2))


def dqdrtic_grad(x):
    g = np.zeros_like(x)
    g[:-2] += 2.0 * x[:-2]
    g[1:-1] += 200.0 * x[1:-1]
    g[2:] += 200.0 * x[2:]
    return g


def engval1(x):
    t = x[:-1] ** 2 + x[1:] ** 2
    return float(np.sum(t**2 - 4.0 * x[:-1] + 3.0))


def engval1_grad(x):
    t = x[:-1] ** 2 + x[1:] ** 2
    g = np.zeros_like(x)
    g[:-1] += 4.0 * x[:-1] * t - 4.0
    g[1:] += 4.0 * x[1:] * t
    return g


def liarwhd(x):
    t = x**2 - x[0]
    return float(np.sum(4.0 * t**2 + (x - 1.0) ** 2))


def liarwhd_grad(x):
    t = x**2 - x[0]
    g = 16.0 * x * t + 2.0 * (x - 1.0)
    g[0] -= 8.0 * np.sum(t)
    return g


def quartc(x):
    i = np.arange(1, x.shape[0] + 1)
    return float(np.sum((x - i) ** 4))


def quartc_grad(x):
    i = np.arange(1, x.shape[0] + 1)
    return 4.0 * (x - i) ** 3


def cosine(x):
    return float(np.sum(np.cos(x[:-1] ** 2 - 0.5 * x[1:])))


def cosine_grad(x):
    s = -np.sin(x[:-1] ** 2 - 0.5 * x[1:])
    g = np.zeros_like(x)
    g[:-1] += 2.0 * x[:-1] * s
    g[1:] -= 0.5 * s
    return g


def _bdqrtic_terms(x):
    n = x.shape[0] - 4
    return (
        x[:n] ** 2
        + 2.0 * x[1 : n + 1] ** 2
        + 3.0 * x[2 : n + 2] ** 2
        + 4.0 * x[3 : n + 3] ** 2
        + 5.0 * x[-1] ** 2
    )


def bdqrtic(x):
    n = x.shape[0] - 4
    t = _bdqrtic_terms(x)
    return float(np.sum((-4.0 * x[:n] + 3.0) ** 2 + t**2))


def bdqrtic_grad(x):
    n = x.shape[0] - 4
    t = _bdqrtic_terms(x)
    g = np.zeros_like(x)
    g[:n] += -8.0 * (-4.0 * x[:n] + 3.0) + 4.0 * x[:n] * t
    g[1 : n + 1] += 8.0 * x[1 : n + 1] * t
    g[2 : n + 2] += 12.0 * x[2 : n + 2] * t
    g[3 : n + 3] += 16.0 * x[3 : n + 3] * t
    g[-1] += 20.0 * x[-1] * np.sum(t)
    return g


def maratosb(x):
    x1, x2 = x
    return float(x1 + 1e6 * (x1**2 + x2**2 - 1.0) ** 2)


def maratosb_grad(x):
    x1, x2 = x
    t = x1**2 + x2**2 - 1.0
    return np.array([1.0 + 4e6 * x1 * t, 4e6 * x2 * t])


GROWTH_N = np.array([8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 18.0, 20.0, 25.0])
GROWTH_G = np.array(
    [8.0, 8.4305, 9.5294, 10.4627, 12.0, 13.0205,
     14.5949, 16.1078, 18.0596, 20.4569, 24.25, 32.9863]
)
GROWTH_LOG_N = np.log(GROWTH_N)


def _growth_model(x):
    u1, u2, u3 = x
    e = np.exp(GROWTH_LOG_N * (u2 + GROWTH_LOG_N * u3))
    return e, u1 * e - GROWTH_G


def growthls(x):
    _, r = _growth_model(x)
    return float(r @ r)


def growthls_grad(x):
    e, r = _growth_model(x)
    u1 = x[0]
    return 2.0 * np.array(
        [r @ e, r @ (u1 * e * GROWTH_LOG_N), r @ (u1 * e * GROWTH_LOG_N**2)]
    )


def _noncvxu2_indices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    i = np.arange(n)
    return i, (2 * i + 1) % n, (3 * i + 2) % n


def noncvxu2(x):
    i, j, k = _noncvxu2_indices(x.shape[0])
    u = x[i] + x[j] + x[k]
    return float(np.sum(u**2 + 4.0 * np.cos(u)))


def noncvxu2_grad(x):
    n = x.shape[0]
    i, j, k = _noncvxu2_indices(n)
    u = x[i] + x[j] + x[k]
    h = 2.0 * u - 4.0 * np.sin(u)
    return (
        np.bincount(i, weights=h, minlength=n)
        + np.bincount(j, weights=h, minlength=n)
        + np.bincount(k, weights=h, minlength=n)
    )


# PALMER1 data, symmetric around X = 0
_PALMER1_X = np.array(
    [1.788963, 1.745329, 1.658063, 1.570796, 1.483530, 1.396263, 1.308997,
     1.218612, 1.134464, 1.047198, 0.872665, 0.698132, 0.523599, 0.349066,
     0.174533]
)
_PALMER1_Y = np.array(
    [78.596218, 65.77963, 43.96947, 27.038816, 14.6126, 6.2614, 1.538330,
     0.0, 1.188045, 4.6841, 16.9321, 33.6988, 52.3664, 70.1630, 83.4221]
)
PALMER1_X = np.concatenate([-_PALMER1_X, [0.0], _PALMER1_X[::-1]])
PALMER1_Y = np.concatenate([_PALMER1_Y, [88.3995], _PALMER1_Y[::-1]])


def _even_polynomial_fit(
        x_data: np.ndarray,
        y_data: np.ndarray,
        terms: int,
) -> tuple[ArrayFunction, GradFunction]:
    """Least squares fit of y_data by sum_j c_j x_data^(2j), j < terms"""
    A = x_data[:, None] ** (2 * np.arange(terms))

    def f(c):
        r = A @ c - y_data
        return float(r @ r)

    def grad(c):
        return 2.0 * A.T @ (A @ c - y_data)

    return f, grad


# PALMER2 and PALMER4 data cover both signs of X
PALMER2_X = np.array(
    [-1.745329, -1.570796, -1.396263, -1.221730, -1.047198, -0.937187, -0.872665,
     -0.698132, -0.523599, -0.349066, -0.174533, 0.0, 0.174533, 0.349066,
     0.523599, 0.698132, 0.872665, 0.937187, 1.047198, 1.221730, 1.396263,
     1.570796, 1.745329]
)
PALMER2_Y = np.array(
    [72.676767, 40.149455, 18.8548, 6.4762, 0.8596, 0.0, 0.2730, 3.2043, 8.1080,
     13.4291, 17.7149, 19.4529, 17.7149, 13.4291, 8.1080, 3.2053, 0.2730, 0.0,
     0.8596, 6.4762, 18.8548, 40.149455, 72.676767]
)
PALMER4_X = np.array(
    [-1.658063, -1.570796, -1.396263, -1.221730, -1.047198, -0.872665, -0.741119,
     -0.698132, -0.523599, -0.349066, -0.174533, 0.0, 0.174533, 0.349066,
     0.523599, 0.698132, 0.741119, 0.872665, 1.047198, 1.221730, 1.396263,
     1.570796, 1.658063]
)
PALMER4_Y = np.array(
    [67.27625, 52.8537, 30.2718, 14.9888, 5.5675, 0.92603, 0.0, 0.085108,
     1.867422, 5.014768, 8.263520, 9.8046208, 8.263520, 5.014768, 1.867422,
     0.085108, 0.0, 0.92603, 5.5675, 14.9888, 30.2718, 52.8537, 67.27625]
)
# PALMER6 and PALMER7 only sample X >= 0
PALMER6_X = np.array(
    [0.0, 1.570796, 1.396263, 1.221730, 1.047198, 0.872665, 0.785398, 0.732789,
     0.698132, 0.610865, 0.523599, 0.349066, 0.174533]
)
PALMER6_Y = np.array(
    [10.678659, 75.414511, 41.513459, 20.104735, 7.432436, 1.298082, 0.171300,
     0.0, 0.068203, 0.774499, 2.070002, 5.574556, 9.026378]
)
PALMER7_X = np.array(
    [0.0, 0.139626, 0.261799, 0.436332, 0.565487, 0.698132, 0.767945, 0.833167,
     0.872665, 0.943092, 1.047198, 1.221730, 1.396263]
)
PALMER7_Y = np.array(
    [4.419446, 3.564931, 2.139067, 0.404686, 0.0, 0.035152, 0.146813, 0.267102,
     0.482839, 0.936762, 1.888770, 4.973340, 10.669541]
)

palmer1c, palmer1c_grad = _even_polynomial_fit(PALMER1_X, PALMER1_Y, 8)
palmer1d, palmer1d_grad = _even_polynomial_fit(PALMER1_X, PALMER1_Y, 7)
palmer2c, palmer2c_grad = _even_polynomial_fit(PALMER2_X, PALMER2_Y, 8)
palmer4c, palmer4c_grad = _even_polynomial_fit(PALMER4_X, PALMER4_Y, 8)
palmer6c, palmer6c_grad = _even_polynomial_fit(PALMER6_X, PALMER6_Y, 8)
palmer7c, palmer7c_grad = _even_polynomial_fit(PALMER7_X, PALMER7_Y, 8)


def registry() -> list[ProblemSpec]:
    """Every problem at its default dimension, in a stable order"""
    convex = frozenset({Tag.CONVEX})
    nonconvex = frozenset({Tag.NONCONVEX})
    ill = frozenset({Tag.ILLCONDITIONED})
    return [
        ProblemSpec("SPHERE", 10, _filled(1.0), sphere, sphere_grad, convex,
                    "f = ||x||^2 / 2", f_star=0.0, scalable=True),
        ProblemSpec("ROSENBROCK", 2, _tiled(-1.2, 1.0), rosenbrock, rosenbrock_grad,
                    nonconvex, "MGH 21, extended Rosenbrock", f_star=0.0,
                    scalable=True, min_dim=2, dim_multiple=2),
        ProblemSpec("GENROSE", 500, lambda n: np.arange(1, n + 1) / (n + 1),
                    genrose, genrose_grad, nonconvex, "SIF GENROSE", f_star=1.0,
                    scalable=True, min_dim=2),
        ProblemSpec("EXTROSNB", 1000, _filled(-1.0), extrosnb, extrosnb_grad,
                    ill | nonconvex, "SIF EXTROSNB", f_star=0.0, scalable=True,
                    min_dim=2, reference=(3568, 6956, 3574)),
        ProblemSpec("DIXONPRICE", 10, _filled(1.0), dixon_price, dixon_price_grad,
                    nonconvex, "Dixon and Price", f_star=0.0, scalable=True,
                    min_dim=2),
        ProblemSpec("TRIGONOMETRIC", 10, lambda n: np.full(n, 1.0 / n),
                    trigonometric, trigonometric_grad, nonconvex, "MGH 26",
                    f_star=0.0, scalable=True),
        ProblemSpec("WOOD", 4, lambda n: np.array([-3.0, -1.0, -3.0, -1.0]), wood,
                    wood_grad, nonconvex, "MGH 14, SIF WOODS (n = 4)", f_star=0.0),
        ProblemSpec("BEALE", 2, _filled(1.0), beale, beale_grad, nonconvex,
                    "MGH 5, SIF BEALE", f_star=0.0),
        ProblemSpec("POWELLSG", 20, _tiled(3.0, -1.0, 0.0, 1.0), powellsg,
                    powellsg_grad, convex, "MGH 22, SIF POWELLSG", f_star=0.0,
                    scalable=True, min_dim=4, dim_multiple=4),
        ProblemSpec("FREUDENSTEIN_ROTH", 10, _tiled(0.5, -2.0), freudenstein_roth,
                    freudenstein_roth_grad, nonconvex,
                    "MGH 2, extended Freudenstein and Roth", scalable=True,
                    min_dim=2, dim_multiple=2),
        ProblemSpec("DIAGQUAD", 100, _filled(1.0), diagquad, diagquad_grad, convex,
                    "f = sum_i i x_i^2 / 2", f_star=0.0, scalable=True),
        ProblemSpec("TRIDIA", 100, _filled(1.0), tridia, tridia_grad, ill | convex,
                    "SIF TRIDIA", f_star=0.0, scalable=True, min_dim=2),
        ProblemSpec("ARWHEAD", 100, _filled(1.0), arwhead, arwhead_grad, convex,
                    "SIF ARWHEAD", f_star=0.0, scalable=True, min_dim=2),
        ProblemSpec("DQDRTIC", 100, _filled(3.0), dqdrtic, dqdrtic_grad, convex,
                    "SIF DQDRTIC", f_star=0.0, scalable=True, min_dim=3),
        ProblemSpec("ENGVAL1", 100, _filled(2.0), engval1, engval1_grad, convex,
                    "SIF ENGVAL1", scalable=True, min_dim=2),
        ProblemSpec("LIARWHD", 100, _filled(4.0), liarwhd, liarwhd_grad, nonconvex,
                    "SIF LIARWHD", f_star=0.0, scalable=True),
        ProblemSpec("QUARTC", 100, _filled(2.0), quartc, quartc_grad, convex,
                    "SIF QUARTC", f_star=0.0, scalable=True),
        ProblemSpec("COSINE", 100, _filled(1.0), cosine, cosine_grad, nonconvex,
                    "SIF COSINE", scalable=True, min_dim=2),
        ProblemSpec("BDQRTIC", 100, _filled(1.0), bdqrtic, bdqrtic_grad, nonconvex,
                    "SIF BDQRTIC", scalable=True, min_dim=5),
        ProblemSpec("MARATOSB", 2, lambda n: np.array([1.1, 0.1]), maratosb,
                    maratosb_grad, ill | nonconvex, "SIF MARATOSB",
                    reference=(212, 614, 389)),
        ProblemSpec("GROWTHLS", 3, lambda n: np.array([100.0, 0.0, 0.0]), growthls,
                    growthls_grad, ill | nonconvex, "SIF GROWTHLS",
                    reference=(1, 2, 2)),
        ProblemSpec("NONCVXU2", 5000, lambda n: np.arange(1.0, n + 1), noncvxu2,
                    noncvxu2_grad, ill | nonconvex, "SIF NONCVXU2", scalable=True,
                    min_dim=2, reference=(6096, 12174, 6098)),
        ProblemSpec("PALMER1C", 8, _filled(1.0), palmer1c, palmer1c_grad,
                    ill | convex, "SIF PALMER1C", reference=(1453, 2093, 1546)),
        ProblemSpec("PALMER1D", 7, _filled(1.0), palmer1d, palmer1d_grad,
                    ill | convex, "SIF PALMER1D", reference=(445, 682, 470)),
        ProblemSpec("PALMER2C", 8, _filled(1.0), palmer2c, palmer2c_grad,
                    ill | convex, "SIF PALMER2C", reference=(307, 440, 318)),
        ProblemSpec("PALMER4C", 8, _filled(1.0), palmer4c, palmer4c_grad,
                    ill | convex, "SIF PALMER4C", reference=(54, 107, 59)),
        ProblemSpec("PALMER6C", 8, _filled(1.0), palmer6c, palmer6c_grad,
                    ill | convex, "SIF PALMER6C", reference=(202, 323, 213)),
        ProblemSpec("PALMER7C", 8, _filled(1.0), palmer7c, palmer7c_grad,
                    ill | convex, "SIF PALMER7C", reference=(6288, 8757, 6576)),
    ]


def problem_names() -> list[str]:
    return [spec.name for spec in registry()]


def get_problem(name: str, dim: Optional[int] = None) -> ProblemSpec:
    """Look up a problem by name (case-insensitive), optionally resized"""
    wanted = name.upper()
    for spec in registry():
        if spec.name == wanted:
            return spec if dim is None else spec.with_dim(dim)
    raise ConfigError(f"Unknown problem: {name}")
