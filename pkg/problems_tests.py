import unittest

import numpy as np

from model_core import ConfigError, finite_difference_check
from problems import PALMER6_Y, Tag, get_problem, problem_names, registry

SMALL_DIM = 12

TABLE_ONE = ("EXTROSNB", "GROWTHLS", "MARATOSB", "NONCVXU2", "PALMER1C", "PALMER1D",
             "PALMER2C", "PALMER4C", "PALMER6C", "PALMER7C")


def known_minimizer(name, n):
    i = np.arange(1, n + 1)
    match name:
        case "ROSENBROCK" | "GENROSE" | "WOOD" | "LIARWHD":
            return np.ones(n)
        case "EXTROSNB":
            return np.concatenate([[-1.0], np.ones(n - 1)])
        case "DIXONPRICE":
            return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)
        case "BEALE":
            return np.array([3.0, 0.5])
        case "TRIDIA":
            return 2.0 ** (1.0 - i)
        case "ARWHEAD":
            return np.concatenate([np.ones(n - 1), [0.0]])
        case "QUARTC":
            return i.astype(np.float64)
        case _:
            return np.zeros(n)


def small(spec):
    return spec.with_dim(SMALL_DIM) if spec.scalable else spec


class RegistryTests(unittest.TestCase):

    def test_names(self):
        names = problem_names()
        self.assertGreaterEqual(len(names), 20)
        self.assertEqual(len(names), len(set(names)))
        for name in ("SPHERE", "ROSENBROCK") + TABLE_ONE:
            self.assertIn(name, names)
        self.assertNotIn("EIGENBLS", names)

    def test_lookup(self):
        self.assertEqual("WOOD", get_problem("wood").name)
        self.assertEqual(8, get_problem("rosenbrock", 8).dim)
        for name, dim in (
            ("NOT_A_PROBLEM", None),
            ("WOOD", 8),
            ("ROSENBROCK", 3),
            ("BDQRTIC", 4),
        ):
            with self.subTest(name=name, dim=dim), self.assertRaises(ConfigError):
                get_problem(name, dim)

    def test_starting_points(self):
        for spec in registry():
            with self.subTest(problem=spec.name):
                self.assertEqual((spec.dim,), spec.x0().shape)
                self.assertEqual((small(spec).dim,), small(spec).x0().shape)
                self.assertTrue(spec.tags)
                self.assertTrue(spec.tags <= set(Tag))

    def test_references(self):
        for name in TABLE_ONE:
            reference = get_problem(name).reference
            self.assertIsNotNone(reference)
            self.assertEqual(3, len(reference))
        self.assertEqual((54, 107, 59), get_problem("PALMER4C").reference)
        self.assertEqual((6288, 8757, 6576), get_problem("PALMER7C").reference)
        self.assertEqual(8, get_problem("PALMER2C").dim)
        for spec in registry():
            if spec.name not in TABLE_ONE:
                self.assertIsNone(spec.reference, spec.name)


class ValueTests(unittest.TestCase):
    """Known values and the analytic gradients"""

    def test_sphere(self):
        spec = get_problem("SPHERE")
        probe = spec.probe()
        x0 = spec.x0()
        self.assertEqual(5.0, probe.eval_f(x0))
        np.testing.assert_array_equal(x0, probe.eval_grad(x0))

    def test_rosenbrock(self):
        probe = get_problem("ROSENBROCK").probe()
        self.assertEqual(0.0, probe.eval_f(np.ones(2)))
        np.testing.assert_array_equal(np.zeros(2), probe.eval_grad(np.ones(2)))
        self.assertAlmostEqual(24.2, probe.eval_f(np.array([-1.2, 1.0])))

    def test_maratosb(self):
        spec = get_problem("MARATOSB")
        probe = spec.probe()
        x0 = spec.x0()
        self.assertAlmostEqual(48401.1, probe.eval_f(x0), places=6)
        np.testing.assert_allclose([968001.0, 88000.0], probe.eval_grad(x0), rtol=1e-12)

    def test_genrose_minimum(self):
        probe = get_problem("GENROSE", SMALL_DIM).probe()
        self.assertEqual(1.0, probe.eval_f(np.ones(SMALL_DIM)))

    def test_extrosnb(self):
        probe = get_problem("EXTROSNB", 4).probe()
        # every x_i - x_{i-1}^2 is -2 at the start
        self.assertEqual(1200.0, probe.eval_f(-np.ones(4)))
        np.testing.assert_array_equal([-800.0, -1200.0, -1200.0, -400.0],
                                      probe.eval_grad(-np.ones(4)))

    def test_palmer_fits(self):
        # zero coefficients leave the residual -Y
        probe = get_problem("PALMER6C").probe()
        c = np.zeros(8)
        self.assertAlmostEqual(float(PALMER6_Y @ PALMER6_Y), probe.eval_f(c))
        for name in ("PALMER1C", "PALMER2C", "PALMER4C", "PALMER6C", "PALMER7C"):
            probe = get_problem(name).probe()
            with self.subTest(problem=name):
                self.assertGreater(probe.eval_f(np.ones(8)), probe.eval_f(np.zeros(8)))

    def test_known_minima(self):
        for spec in registry():
            if spec.f_star is None:
                continue
            spec = small(spec)
            probe = spec.probe()
            x_star = known_minimizer(spec.name, spec.dim)
            with self.subTest(problem=spec.name):
                self.assertAlmostEqual(spec.f_star, probe.eval_f(x_star), places=12)
                self.assertLessEqual(np.max(np.abs(probe.eval_grad(x_star))), 1e-12)
                self.assertLess(spec.f_star, probe.eval_f(spec.x0()))

    def test_gradients(self):
        rng = np.random.default_rng(41)
        for spec in registry():
            spec = small(spec)
            probe = spec.probe()
            x0 = spec.x0()
            points = [x0] + [
                x0 + 0.1 * (1.0 + np.abs(x0)) * rng.standard_normal(spec.dim)
                for _ in range(5)
            ]
            for x in points:
                with self.subTest(problem=spec.name):
                    # rounding in f dominates the differences of large values
                    tol = 1e-6 + 1e-12 * max(1.0, abs(probe.eval_f(x)))
                    self.assertLessEqual(finite_difference_check(probe, x), tol)


if __name__ == "__main__":
    unittest.main()
