"""Solvers for the p-regularized model subproblems.

The production path works on the 2x2 model over span{g, s}:

    min c2^T v + 1/2 v^T B v + sigma/p ||v||_N^p,    v = (mu, nu)

with N = B (HESSNORM) or N = E, the Gram matrix of (g, s) (EUCLIDNORM).
`whole_space_oracle` and `brute_force_2d_oracle` are independent references
used to validate the fast paths.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from model_core import (
    CollinearityError,
    DomainError,
    IndefiniteModelError,
    NormKind,
    NumericError,
    UnsupportedHardCaseError,
)
from smcg_protocols import Vector

# Cardano's formula cancels badly for tiny sigma when p = 4
CARDANO_MIN_SIGMA = 1e-12
SECULAR_TOL = 1e-13
EUCLID_ROOT_TOL = 1e-12
MAX_ROOT_ITER = 100

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SubproblemInput:
    """The data of one 2x2 regularized model"""

    c2: Vector
    B: np.ndarray
    E: Optional[np.ndarray]
    sigma: float
    p: float
    norm_kind: NormKind

    @classmethod
    def from_vectors(
            cls,
            g: Vector,
            s: Vector,
            y: Vector,
            rho: float,
            sigma: float,
            p: float,
            norm_kind: NormKind,
    ) -> "SubproblemInput":
        """Build c2, B and E from the gradient and the last step pair"""
        gg = float(g @ g)
        gs = float(g @ s)
        gy = float(g @ y)
        sty = float(s @ y)
        ss = float(s @ s)
        return cls(
            c2=np.array([gg, gs]),
            B=np.array([[rho, gy], [gy, sty]]),
            E=np.array([[gg, gs], [gs, ss]]),
            sigma=sigma,
            p=p,
            norm_kind=norm_kind,
        )

    def norm_matrix(self) -> np.ndarray:
        if self.norm_kind is NormKind.HESSNORM:
            return self.B
        if self.E is None:
            raise DomainError("EUCLIDNORM input needs the matrix E")
        return self.E


@dataclass(frozen=True)
class SubproblemSolution:
    """Minimizer (mu, nu) of a 2x2 model, d = mu g + nu s"""

    mu: float
    nu: float
    z_star: float
    lambda_: float
    shrink_T: float
    clamped: bool

    @property
    def coefficients(self) -> Vector:
        return np.array([self.mu, self.nu])


def _psi(p: float, sigma: float, q_tilde: float, z: float) -> float:
    return sigma * z ** (p - 1) + z - q_tilde


def _newton_polish(p: float, sigma: float, q_tilde: float, z: float) -> float:
    """A few Newton steps on psi; psi is increasing and convex on z >= 0"""
    tol = SECULAR_TOL * max(1.0, q_tilde)
    for _ in range(4):
        val = _psi(p, sigma, q_tilde, z)
        if abs(val) <= tol:
            break
        z = max(0.0, z - val / (sigma * (p - 1) * z ** (p - 2) + 1.0))
    return z


def _check_secular_args(sigma: float, q_tilde: float) -> None:
    if sigma < 0 or q_tilde < 0:
        raise DomainError(
            f"secular equation needs sigma >= 0 and q >= 0, got {sigma}, {q_tilde}"
        )


def secular_root_closed(p: float, sigma: float, q_tilde: float) -> float:
    """Nonnegative root of sigma z^(p-1) + z - q = 0 for p in {3, 4}"""
    _check_secular_args(sigma, q_tilde)
    if p not in (3, 4):
        raise DomainError(f"closed-form roots exist for p = 3 and p = 4, got {p}")
    if q_tilde == 0:
        return 0.0
    if sigma == 0:
        return float(q_tilde)
    if p == 3:
        return 2.0 * q_tilde / (1.0 + math.sqrt(1.0 + 4.0 * sigma * q_tilde))
    if sigma < CARDANO_MIN_SIGMA:
        return secular_root_general(p, sigma, q_tilde)
    # z^3 + z / sigma - q / sigma = 0
    half = q_tilde / (2.0 * sigma)
    root = math.sqrt(half * half + (1.0 / (3.0 * sigma)) ** 3)
    z = float(np.cbrt(half + root) + np.cbrt(half - root))
    return _newton_polish(p, sigma, q_tilde, max(z, 0.0))


def secular_root_general(
        p: float,
        sigma: float,
        q_tilde: float,
        max_iter: int = MAX_ROOT_ITER,
) -> float:
    """Nonnegative root of psi(z) = sigma z^(p-1) + z - q for any p > 2.

    Newton's method safeguarded by bisection on a bracket [lo, hi] with
    psi(lo) <= 0 <= psi(hi).
    """
    _check_secular_args(sigma, q_tilde)
    if p <= 2:
        raise DomainError(f"need p > 2, got {p}")
    if q_tilde == 0:
        return 0.0
    if sigma == 0:
        return float(q_tilde)
    tol = SECULAR_TOL * max(1.0, q_tilde)
    lo = 0.0
    # both q and (q / sigma)^(1/(p-1)) bound the root from above
    hi = min(q_tilde, (q_tilde / sigma) ** (1.0 / (p - 1)))
    z = hi
    for _ in range(max_iter):
        val = _psi(p, sigma, q_tilde, z)
        if abs(val) <= tol:
            return z
        if val > 0:
            hi = z
        else:
            lo = z
        if hi - lo <= 4.0 * _EPS * hi:
            return z
        slope = sigma * (p - 1) * z ** (p - 2) + 1.0
        trial = z - val / slope
        if not lo < trial < hi:
            trial = 0.5 * (lo + hi)
        z = trial
    raise NumericError(
        f"secular root did not converge (p={p}, sigma={sigma}, q={q_tilde})"
    )


def _secular_root(p: float, sigma: float, q_tilde: float) -> float:
    if p in (3, 4):
        return secular_root_closed(p, sigma, q_tilde)
    return secular_root_general(p, sigma, q_tilde)


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _solve2(m: np.ndarray, rhs: Vector, det: float) -> Vector:
    """Cramer's rule for a symmetric 2x2 system"""
    return np.array([
        (m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det,
        (m[0, 0] * rhs[1] - m[0, 1] * rhs[0]) / det,
    ])


def eigh_2x2(m: np.ndarray) -> tuple[Vector, np.ndarray]:
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix.

    Returns ascending eigenvalues and the orthonormal eigenvectors as columns.
    """
    a, b, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 1])
    half_trace = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    lam1 = half_trace - radius
    # the larger root is accurate; take the smaller one from the determinant
    lam2 = half_trace + radius
    if lam2 != 0.0 and half_trace > 0:
        lam1 = (a * d - b * b) / lam2
    if b == 0.0:
        if a <= d:
            vecs = np.eye(2)
        else:
            vecs = np.array([[0.0, 1.0], [1.0, 0.0]])
        return np.array([min(a, d), max(a, d)]), vecs
    # (b, lam - a) is an eigenvector; pick the better conditioned form
    if abs(lam1 - a) >= abs(lam1 - d):
        v1 = np.array([b, lam1 - a])
    else:
        v1 = np.array([lam1 - d, b])
    v1 /= math.hypot(v1[0], v1[1])
    v2 = np.array([-v1[1], v1[0]])
    return np.array([lam1, lam2]), np.column_stack((v1, v2))


def inv_sqrt_2x2(m: np.ndarray) -> np.ndarray:
    """M^(-1/2) of a symmetric positive definite 2x2 matrix"""
    vals, vecs = eigh_2x2(m)
    if vals[0] <= 0:
        raise CollinearityError("matrix is not positive definite")
    return (vecs / np.sqrt(vals)) @ vecs.T


def solve_hessnorm(
        inp: SubproblemInput,
        safeguard: bool = True,
) -> SubproblemSolution:
    """Minimizer of the model in the B-norm: (mu, nu) = -T B^{-1} c2.

    With the safeguard on, T is clamped to 1/2 whenever
    sigma (z*)^(p-2) > 1.
    """
    det = _det2(inp.B)
    if not det > 0 or not inp.B[0, 0] > 0:
        raise IndefiniteModelError(f"model determinant {det:g} is not positive")
    if not np.any(inp.c2):
        raise DomainError("the model needs a nonzero linear term")
    bar = -_solve2(inp.B, inp.c2, det)
    q_tilde = math.sqrt(max(0.0, -float(inp.c2 @ bar)))
    z_star = _secular_root(inp.p, inp.sigma, q_tilde)
    weight = inp.sigma * z_star ** (inp.p - 2)
    clamped = safeguard and weight > 1.0
    if clamped:
        weight = 1.0
    shrink = 1.0 / (1.0 + weight)
    coef = shrink * bar
    return SubproblemSolution(
        mu=float(coef[0]),
        nu=float(coef[1]),
        z_star=z_star,
        lambda_=weight,
        shrink_T=shrink,
        clamped=clamped,
    )


def _euclid_phi(
        beta2: Vector,
        eigvals: Vector,
        sigma: float,
        p: float,
        z: float,
) -> tuple[float, float]:
    """phi(z) and phi'(z) of the Euclidean-norm secular equation"""
    shift = eigvals + sigma * z ** (p - 2)
    value = float(np.sum(beta2 / shift**2) - z * z)
    if z > 0:
        dshift = sigma * (p - 2) * z ** (p - 3)
        slope = float(-2.0 * dshift * np.sum(beta2 / shift**3) - 2.0 * z)
    else:
        slope = -math.inf
    return value, slope


def _euclid_root(
        beta2: Vector,
        eigvals: Vector,
        sigma: float,
        p: float,
) -> tuple[float, float]:
    """Root of phi on [0, z_hi] by Newton's method safeguarded by bisection"""
    z_hi = math.sqrt(float(np.sum(beta2 / eigvals**2)))
    tol = EUCLID_ROOT_TOL * max(1.0, z_hi * z_hi)
    lo, hi = 0.0, z_hi
    z = z_hi
    for _ in range(MAX_ROOT_ITER):
        value, slope = _euclid_phi(beta2, eigvals, sigma, p, z)
        if value > 0:
            lo = z
        else:
            hi = z
        if abs(value) <= tol:
            # one more Newton step, kept inside the bracket
            polished = z - value / slope if math.isfinite(slope) and slope < 0 else z
            return (polished if lo <= polished <= hi else z), z_hi
        if hi - lo <= 4.0 * _EPS * hi:
            return z, z_hi
        trial = z - value / slope if math.isfinite(slope) and slope < 0 else lo
        if not lo < trial < hi:
            trial = 0.5 * (lo + hi)
        z = trial
    raise NumericError("Euclidean secular equation did not converge")


def solve_euclidnorm(
        inp: SubproblemInput,
        curvature_cap: float = math.inf,
) -> SubproblemSolution:
    """Minimizer of the model in the E-norm: (B + lambda E)(mu, nu) = -c2.

    lambda = sigma (z*)^(p-2) is capped at curvature_cap, which the solver
    sets to ||y||^2 / s^T y.
    """
    E = inp.norm_matrix()
    det_e = _det2(E)
    if not E[0, 0] > 0 or not det_e > _EPS * E[0, 0] * E[1, 1]:
        raise CollinearityError("g and s are numerically collinear")
    det_b = _det2(inp.B)
    if not det_b > 0 or not inp.B[0, 0] > 0:
        raise IndefiniteModelError(f"model determinant {det_b:g} is not positive")
    if not np.any(inp.c2):
        raise DomainError("the model needs a nonzero linear term")

    if inp.sigma == 0:
        lam = 0.0
        bar = -_solve2(inp.B, inp.c2, det_b)
        z_star = math.sqrt(max(0.0, float(bar @ E @ bar)))
    else:
        root_e = inv_sqrt_2x2(E)
        eigvals, vecs = eigh_2x2(root_e @ inp.B @ root_e)
        if eigvals[0] <= 0:
            raise IndefiniteModelError("scaled model matrix is not positive definite")
        beta = vecs.T @ (root_e @ inp.c2)
        z_star, _ = _euclid_root(beta**2, eigvals, inp.sigma, inp.p)
        lam = inp.sigma * z_star ** (inp.p - 2)

    clamped = lam > curvature_cap
    if clamped:
        lam = curvature_cap
    shifted = inp.B + lam * E
    det_shift = _det2(shifted)
    if not det_shift > 0:
        raise IndefiniteModelError(f"shifted determinant {det_shift:g} is not positive")
    coef = -_solve2(shifted, inp.c2, det_shift)
    return SubproblemSolution(
        mu=float(coef[0]),
        nu=float(coef[1]),
        z_star=z_star,
        lambda_=lam,
        shrink_T=1.0,
        clamped=clamped,
    )


def model_value(inp: SubproblemInput, v: Vector) -> float:
    """Value of the regularized 2x2 model at v = (mu, nu)"""
    v = np.asarray(v, dtype=np.float64)
    norm2 = max(0.0, float(v @ inp.norm_matrix() @ v))
    return float(
        inp.c2 @ v + 0.5 * v @ inp.B @ v + inp.sigma / inp.p * norm2 ** (inp.p / 2)
    )


def _model_grad(inp: SubproblemInput, v: Vector) -> Vector:
    N = inp.norm_matrix()
    norm2 = max(0.0, float(v @ N @ v))
    return inp.c2 + inp.B @ v + inp.sigma * norm2 ** ((inp.p - 2) / 2) * (N @ v)


def brute_force_2d_oracle(
        inp: SubproblemInput,
        grid_radius: Optional[float] = None,
        grid_steps: int = 201,
) -> tuple[float, float, float]:
    """Grid minimizer of the 2x2 model, polished by one local descent.

    The default radius is five times the norm of the quadratic minimizer.
    """
    if grid_steps < 101:
        raise DomainError(f"grid_steps must be at least 101, got {grid_steps}")
    if grid_radius is None:
        det = _det2(inp.B)
        if det > 0:
            grid_radius = 5.0 * float(np.linalg.norm(_solve2(inp.B, inp.c2, det)))
        else:
            grid_radius = 5.0 * float(np.linalg.norm(inp.c2))
        grid_radius = max(grid_radius, 1e-12)
    axis = np.linspace(-grid_radius, grid_radius, grid_steps)
    mu, nu = np.meshgrid(axis, axis, indexing="ij")
    N = inp.norm_matrix()
    B = inp.B
    norm2 = N[0, 0] * mu**2 + 2 * N[0, 1] * mu * nu + N[1, 1] * nu**2
    values = (
        inp.c2[0] * mu
        + inp.c2[1] * nu
        + 0.5 * (B[0, 0] * mu**2 + 2 * B[0, 1] * mu * nu + B[1, 1] * nu**2)
        + inp.sigma / inp.p * np.maximum(norm2, 0.0) ** (inp.p / 2)
    )
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    start = np.array([mu[i, j], nu[i, j]])
    polished = optimize.minimize(
        lambda v: model_value(inp, v),
        start,
        jac=lambda v: _model_grad(inp, v),
        method="BFGS",
        options={"gtol": 1e-12},
    )
    best = polished.x if polished.fun <= values[i, j] else start
    return float(best[0]), float(best[1]), model_value(inp, best)


def whole_space_oracle(
        H: np.ndarray,
        A: np.ndarray,
        c: Vector,
        sigma: float,
        p: float,
) -> Vector:
    """Global minimizer of c^T x + 1/2 x^T H x + sigma/p ||x||_A^p for small n.

    Follows the change of variables y = A^(1/2) x and the eigen-decomposition
    of A^(-1/2) H A^(-1/2) literally; the secular equation is solved with
    scipy's brentq so that it is independent of the production root finders.
    """
    H = np.asarray(H, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    if n > 10:
        raise DomainError(f"the whole-space oracle is for n <= 10, got {n}")
    if not np.any(c):
        return np.zeros(n)
    a_vals, a_vecs = np.linalg.eigh(A)
    if a_vals[0] <= 0:
        raise DomainError("A must be positive definite")
    a_inv_root = (a_vecs / np.sqrt(a_vals)) @ a_vecs.T
    eigvals, V = np.linalg.eigh(a_inv_root @ H @ a_inv_root)
    beta = V.T @ (a_inv_root @ c)
    beta2 = beta**2

    if sigma == 0:
        if eigvals[0] <= 0:
            raise UnsupportedHardCaseError("unregularized model is not convex")
        lam = 0.0
    else:
        def phi(z: float) -> float:
            return float(np.sum(beta2 / (eigvals + sigma * z ** (p - 2)) ** 2) - z * z)

        z_lo = 0.0
        if eigvals[0] < 0:
            z_lo = (-eigvals[0] / sigma) ** (1.0 / (p - 2))
            z_lo *= 1.0 + 1e-12
        if phi(z_lo) <= 0:
            raise UnsupportedHardCaseError("hard case: projection on the lowest mode vanishes")
        z_hi = max(z_lo, 1.0)
        while phi(z_hi) > 0:
            z_hi *= 2.0
        z_star = optimize.brentq(phi, z_lo, z_hi, xtol=1e-15, rtol=4 * _EPS, maxiter=500)
        lam = sigma * z_star ** (p - 2)

    a = -beta / (eigvals + lam)
    x = a_inv_root @ (V @ a)
    shifted_min = np.linalg.eigvalsh(H + lam * A)[0]
    scale = max(1.0, float(np.max(np.abs(H))), lam * float(np.max(np.abs(A))))
    if shifted_min < -1e-10 * scale:
        raise NumericError("second-order optimality condition fails")
    return x
