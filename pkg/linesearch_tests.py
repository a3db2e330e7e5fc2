import math
import unittest

import numpy as np

from linesearch import (
    MAX_EVALUATIONS,
    NonmonotoneRef,
    initial_step_conjugate,
    initial_step_neggrad,
    initial_step_subspace,
    interpolated_minimizer,
    q_ceiling,
    segment_t,
    update_nonmonotone,
    wolfe_search,
)
from model_core import (
    DirKind,
    DomainError,
    LineSearchError,
    PairData,
    SolverParams,
    SolverState,
)
from problems import Problem, get_problem


# f(x) = ||x||^2 / 2 - sum(x), minimized at ones
SHIFTED_SPHERE = Problem(
    "shifted_sphere", 1, lambda x: 0.5 * float(x @ x) - float(np.sum(x)),
    lambda x: x - 1.0,
)
# f(x) = x_0 + x_0^2
PARABOLA = Problem(
    "parabola", 2, lambda x: float(x[0] + x[0] ** 2),
    lambda x: np.array([1.0 + 2.0 * x[0], 0.0]),
)
# constant value with a gradient that claims descent is possible
LIAR = Problem("liar", 1, lambda x: 1.0, lambda x: np.ones_like(x))


def make_state(g, s, y, x=None, f=0.0):
    g = np.asarray(g, dtype=np.float64)
    return SolverState(
        k=1,
        x=np.zeros_like(g) if x is None else np.asarray(x, dtype=np.float64),
        g=g,
        f=f,
        d=-g,
        pair=PairData.from_vectors(np.asarray(s, dtype=np.float64),
                                   np.asarray(y, dtype=np.float64)),
        f_prev=f + 1.0,
    )


class WolfeSearchTests(unittest.TestCase):
    """The Armijo test against C_k and the curvature test"""

    params = SolverParams()

    def test_unit_step_accepted(self):
        x = np.array([0.0])
        g = SHIFTED_SPHERE.eval_grad(x)
        result = wolfe_search(SHIFTED_SPHERE, x, 0.0, g, -g, 1.0, 0.0, self.params)
        self.assertEqual(1.0, result.alpha)
        self.assertEqual(-0.5, result.f_new)
        np.testing.assert_array_equal([0.0], result.g_new)
        self.assertEqual((1, 1), (result.n_f, result.n_g))

    def test_ascent_direction(self):
        x = np.array([0.0])
        g = SHIFTED_SPHERE.eval_grad(x)
        with self.assertRaises(DomainError):
            wolfe_search(SHIFTED_SPHERE, x, 0.0, g, g, 1.0, 0.0, self.params)

    def test_gives_up(self):
        x = np.array([0.0])
        with self.assertRaises(LineSearchError):
            wolfe_search(LIAR, x, 1.0, np.ones(1), -np.ones(1), 1.0, 1.0, self.params)

    def test_conditions_hold(self):
        spec = get_problem("ROSENBROCK")
        probe = spec.probe()
        rng = np.random.default_rng(21)
        for alpha0 in (1e-4, 1e-2, 1.0, 1e2):
            x = spec.x0() + 0.1 * rng.standard_normal(2)
            f = probe.eval_f(x)
            g = probe.eval_grad(x)
            d = -g
            gtd = float(g @ d)
            result = wolfe_search(probe, x, f, g, d, alpha0, f, self.params)
            self.assertLessEqual(
                result.f_new, f + self.params.delta * result.alpha * gtd
            )
            self.assertGreaterEqual(float(result.g_new @ d), self.params.sigma * gtd)
            self.assertLessEqual(result.n_f, MAX_EVALUATIONS)

    def test_nonmonotone_reference(self):
        """A larger C_k accepts a step that raises f"""
        x = np.array([0.0])
        g = SHIFTED_SPHERE.eval_grad(x)
        result = wolfe_search(SHIFTED_SPHERE, x, 0.0, g, -g, 2.0, 1.0, self.params)
        self.assertEqual(2.0, result.alpha)
        self.assertEqual(0.0, result.f_new)


class NonmonotoneTests(unittest.TestCase):

    def test_fixed_weight(self):
        ref = update_nonmonotone(NonmonotoneRef(C=10.0, Q=1.0, l=20, k=3), 2.0,
                                 eta_k=1.0)
        self.assertEqual((6.0, 2.0, 4), (ref.C, ref.Q, ref.k))
        ref = update_nonmonotone(ref, 1.0, eta_k=0.0)
        self.assertEqual((1.0, 1.0), (ref.C, ref.Q))

    def test_first_update(self):
        ref = update_nonmonotone(NonmonotoneRef.start(5.0, 3), 3.0)
        self.assertEqual((4.0, 2.0, 1), (ref.C, ref.Q, ref.k))
        self.assertEqual(20, ref.l)
        ref = update_nonmonotone(NonmonotoneRef.start(5.0, 3), 4.5)
        self.assertEqual(5.0, ref.C)

    def test_random_sequences(self):
        rng = np.random.default_rng(22)
        for n in (3, 50):
            ref = NonmonotoneRef.start(100.0, n)
            ceiling = q_ceiling(ref.l)
            for _ in range(5000):
                # any value passing the Armijo test lies below C
                f_new = ref.C - float(rng.exponential(1.0))
                ref = update_nonmonotone(ref, f_new)
                self.assertLessEqual(f_new, ref.C)
                self.assertLessEqual(ref.Q, ceiling)

    def test_q_ceiling(self):
        self.assertAlmostEqual(21001.0, q_ceiling(20), places=6)


class InitialStepTests(unittest.TestCase):

    params = SolverParams()

    def test_interpolated_minimizer(self):
        self.assertEqual(0.5, interpolated_minimizer(0.0, -1.0, 1.0, 0.0))
        self.assertIsNone(interpolated_minimizer(0.0, -1.0, 1.0, -2.0))

    def test_subspace_interpolates(self):
        x = np.array([0.0, 0.0])
        g = PARABOLA.eval_grad(x)
        alpha = initial_step_subspace(PARABOLA, x, 0.0, g, -g, True, self.params)
        self.assertAlmostEqual(0.5, alpha)

    def test_subspace_unit_step(self):
        x = np.array([0.0, 0.0])
        g = PARABOLA.eval_grad(x)
        self.assertEqual(
            1.0, initial_step_subspace(PARABOLA, x, 0.0, g, -g, False, self.params)
        )
        concave = Problem("concave", 1, lambda z: -float(z @ z), lambda z: -2.0 * z)
        x = np.array([1.0])
        g = concave.eval_grad(x)
        self.assertEqual(
            1.0, initial_step_subspace(concave, x, -1.0, g, -g, True, self.params)
        )

    def test_neggrad_bb_steps(self):
        state = make_state([1.0, 0.0], [1.0, 1.0], [2.0, 1.0])
        self.assertAlmostEqual(0.6, initial_step_neggrad(PARABOLA, state, self.params, 0))
        state = make_state([-1.0, 0.0], [1.0, 0.0], [2.0, 0.0])
        self.assertAlmostEqual(0.5, initial_step_neggrad(PARABOLA, state, self.params, 0))

    def test_neggrad_interpolates(self):
        state = make_state([1.0, 0.0], [1.0, 1.0], [2.0, 1.0])
        state.quad_close = True
        state.prev_dir_kind = DirKind.QUAD
        self.assertAlmostEqual(0.5, initial_step_neggrad(PARABOLA, state, self.params, 0))
        state.prev_dir_kind = DirKind.NEGGRAD
        self.assertAlmostEqual(0.6, initial_step_neggrad(PARABOLA, state, self.params, 0))

    def test_neggrad_first_step(self):
        state = SolverState(k=0, x=np.zeros(2), g=np.array([3.0, 4.0]), f=0.0,
                            d=np.array([-3.0, -4.0]))
        self.assertEqual(1.0, initial_step_neggrad(PARABOLA, state, self.params, 0))
        self.assertEqual(
            0.25, initial_step_neggrad(PARABOLA, state, SolverParams(first_step=0.25), 0)
        )

    def test_neggrad_negative_curvature(self):
        # s^T y < 0 leaves no BB step, fall back to 1 / ||g||
        state = make_state([3.0, 4.0], [1.0, 0.0], [-1.0, 0.0])
        self.assertAlmostEqual(0.2, initial_step_neggrad(PARABOLA, state, self.params, 0))

    def test_conjugate_interpolates(self):
        # phi(a) = -a + a^2 along -g from the origin
        state = SolverState(k=1, x=np.zeros(2), g=np.array([1.0, 0.0]), f=0.0,
                            d=np.array([-1.0, 0.0]), alpha_prev=1.0)
        self.assertAlmostEqual(0.5, initial_step_conjugate(PARABOLA, state, self.params))

    def test_conjugate_grows(self):
        # phi rose at the trial 0.1 * 20, so the previous step is doubled
        state = SolverState(k=1, x=np.zeros(2), g=np.array([1.0, 0.0]), f=0.0,
                            d=np.array([-1.0, 0.0]), alpha_prev=20.0)
        self.assertEqual(40.0, initial_step_conjugate(PARABOLA, state, self.params))
        state.alpha_prev = 1e-6
        self.assertGreater(initial_step_conjugate(PARABOLA, state, self.params), 1e-6)

    def test_segment_t(self):
        state = SolverState(k=0, x=np.zeros(2), g=np.ones(2), f=0.0, d=-np.ones(2))
        self.assertTrue(math.isinf(segment_t(state)))
        state = make_state([1.0, 0.0], [0.0, 1.0], [0.0, 1.0], f=1.0)
        # f_prev = 2, g^T s = 0, s^T y = 1
        self.assertEqual(1.0, segment_t(state))
        state = make_state([1.0, 0.0], [0.0, 1.0], [0.0, -1.0], f=1.0)
        self.assertTrue(math.isinf(segment_t(state)))


if __name__ == "__main__":
    unittest.main()
