import csv
import math
import os
import tempfile
import unittest

from bench import (
    METHODS,
    PROFILE_COLUMNS,
    ProfileSummary,
    SuiteConfig,
    emit,
    main,
    performance_profile,
    profile_summary,
    read_records,
    run_suite,
)
from model_core import ConfigError, DomainError, EmitError, RunStatus
from solver import RunRecord


def make_record(problem, method, ng, status=RunStatus.CONVERGED):
    return RunRecord(
        problem=problem,
        n=2,
        method=method,
        status=status,
        iters=ng - 1,
        n_f=ng + 1,
        n_g=ng,
        time_s=0.125,
        final_f=1e-13 / 3,
        final_gnorm_inf=math.pi * 1e-7,
        dir_kind_histogram={"NEGGRAD": 1, "QUAD": ng - 2},
    )


def outcome(record):
    return (record.problem, record.n, record.method, record.status,
            record.iters, record.n_f, record.n_g, record.final_f)


# each solver wins one problem and needs twice the best cost on the other
CROSSED = [
    make_record("P1", "a", 10),
    make_record("P1", "b", 20),
    make_record("P2", "a", 20),
    make_record("P2", "b", 10),
]


class RunSuiteTests(unittest.IsolatedAsyncioTestCase):

    async def test_single_run(self):
        records = await run_suite(SuiteConfig(methods=["smcg_pr1"], problems=["SPHERE"]))
        self.assertEqual(1, len(records))
        self.assertIs(RunStatus.CONVERGED, records[0].status)
        self.assertEqual(("SPHERE", "smcg_pr1"), (records[0].problem, records[0].method))

    async def test_unknown_names(self):
        for config in (
            SuiteConfig(methods=["smcg_pr1"], problems=["SPHERE", "NOT_A_PROBLEM"]),
            SuiteConfig(methods=["smcg_pr9"], problems=["SPHERE"]),
            SuiteConfig(methods=[], problems=["SPHERE"]),
            SuiteConfig(methods=["hs"], problems=["SPHERE"], jobs=0),
        ):
            with self.subTest(config=config), self.assertRaises(ConfigError):
                await run_suite(config)

    async def test_order(self):
        config = SuiteConfig(methods=["smcg_pr2", "hs"], problems=["SPHERE", "WOOD"])
        records = await run_suite(config)
        self.assertEqual(
            [("smcg_pr2", "SPHERE"), ("smcg_pr2", "WOOD"), ("hs", "SPHERE"), ("hs", "WOOD")],
            [(r.method, r.problem) for r in records],
        )

    async def test_jobs_do_not_change_results(self):
        config = SuiteConfig(
            methods=["smcg_pr1", "smcg_pr2_p4", "prp"],
            problems=["ROSENBROCK", "BEALE", "DIAGQUAD"],
            dims={"diagquad": 20},
        )
        serial = await run_suite(config)
        config.jobs = 3
        parallel = await run_suite(config)
        self.assertEqual([outcome(r) for r in serial], [outcome(r) for r in parallel])
        self.assertEqual(20, serial[2].n)

    def test_method_table(self):
        for name in ("smcg_pr1", "smcg_pr2", "fr", "hs", "prp", "dy", "hz"):
            self.assertIn(name, METHODS)


class ProfileTests(unittest.TestCase):
    """Dolan-More performance profiles"""

    def test_crossed(self):
        table = performance_profile(CROSSED, "ng")
        self.assertEqual([1.0, 2.0], table.tau_grid)
        self.assertEqual({"a": [0.5, 1.0], "b": [0.5, 1.0]}, table.rho)

    def test_dominating_solver(self):
        records = CROSSED[:2] + [make_record("P2", "a", 5), make_record("P2", "b", 20)]
        table = performance_profile(records, "ng")
        self.assertEqual([1.0, 1.0, 1.0], table.rho["a"])
        self.assertEqual([0.0, 0.5, 1.0], table.rho["b"])
        self.assertEqual([1.0, 2.0, 4.0], table.tau_grid)

    def test_failed_run(self):
        records = CROSSED[:3] + [make_record("P2", "b", 10, RunStatus.MAX_ITER)]
        table = performance_profile(records, "ng", tau_grid=[1.0, 2.0, 1e6])
        self.assertEqual([1.0, 1.0, 1.0], table.rho["a"])
        self.assertEqual([0.0, 0.5, 0.5], table.rho["b"])

    def test_problem_nobody_solves(self):
        records = CROSSED + [
            make_record("P3", "a", 10, RunStatus.LINE_SEARCH_FAIL),
            make_record("P3", "b", 10, RunStatus.EVAL_FAIL),
        ]
        table = performance_profile(records, "iters")
        for curve in table.rho.values():
            self.assertLessEqual(max(curve), 2.0 / 3.0)

    def test_zero_best_cost(self):
        # a converges at x0 on P1, b takes three iterations
        records = [make_record("P1", "a", 1), make_record("P1", "b", 4),
                   make_record("P2", "a", 10), make_record("P2", "b", 10)]
        table = performance_profile(records, "iters")
        self.assertEqual([1.0, 3.0], table.tau_grid)
        self.assertEqual({"a": [1.0, 1.0], "b": [0.5, 1.0]}, table.rho)

    def test_monotone_curves(self):
        table = performance_profile(CROSSED + [make_record("P3", "a", 7),
                                               make_record("P3", "b", 9)], "nf")
        for curve in table.rho.values():
            self.assertEqual(sorted(curve), curve)
            self.assertTrue(all(0.0 <= v <= 1.0 for v in curve))

    def test_errors(self):
        with self.assertRaises(DomainError):
            performance_profile(CROSSED[:1], "ng")
        with self.assertRaises(DomainError):
            performance_profile([], "ng")
        with self.assertRaises(ConfigError):
            performance_profile(CROSSED, "flops")
        with self.assertRaises(DomainError):
            performance_profile(CROSSED, "ng", tau_grid=[0.5, 1.0])
        with self.assertRaises(DomainError):
            performance_profile(CROSSED, "ng", tau_grid=[2.0, 1.0])

    def test_summary(self):
        summary = profile_summary(performance_profile(CROSSED, "ng"))
        self.assertEqual(ProfileSummary(solved=1.0, wins=0.5), summary["a"])


class EmitTests(unittest.TestCase):
    """Result files and their parser"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_records_round_trip(self):
        for name in ("results.csv", "results.json"):
            with self.subTest(name=name):
                emit(CROSSED, self.path(name))
                self.assertEqual(CROSSED, read_records(self.path(name)))

    def test_json_keeps_histogram(self):
        emit(CROSSED, self.path("results.json"))
        records = read_records(self.path("results.json"))
        self.assertEqual(CROSSED[0].dir_kind_histogram, records[0].dir_kind_histogram)

    def test_profile_csv(self):
        table = performance_profile(CROSSED, "ng")
        emit(table, self.path("profile.csv"))
        with open(self.path("profile.csv"), newline="") as fh:
            rows = list(csv.reader(fh))
        self.assertEqual(list(PROFILE_COLUMNS), rows[0])
        self.assertEqual(4, len(rows) - 1)
        self.assertEqual(["1.0", "a", "0.5"], rows[1])

    def test_profile_recomputed(self):
        emit(CROSSED, self.path("results.csv"))
        table = performance_profile(CROSSED, "ng")
        self.assertEqual(table, performance_profile(read_records(self.path("results.csv")), "ng"))

    def test_errors(self):
        with self.assertRaises(EmitError):
            emit(CROSSED, self.path(os.path.join("missing", "results.csv")))
        with self.assertRaises(ConfigError):
            emit(CROSSED, self.path("results.txt"), fmt="xml")
        with self.assertRaises(ConfigError):
            read_records(self.path("missing.csv"))
        with open(self.path("other.csv"), "w") as fh:
            fh.write("a,b\n1,2\n")
        with self.assertRaises(ConfigError):
            read_records(self.path("other.csv"))


class MainTests(unittest.IsolatedAsyncioTestCase):
    """The command line, end to end"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    async def test_run_and_profile(self):
        out = self.path("results.csv")
        code = await main(["run", "--methods", "smcg_pr1,hs", "--problems", "SPHERE,BEALE",
                           "--out", out, "--trace", "--tol", "1e-7"])
        self.assertEqual(0, code)
        self.assertEqual(4, len(read_records(out)))
        self.assertTrue(os.path.exists(out + ".trace.csv"))

        profile = self.path("profile.json")
        code = await main(["profile", "--inputs", out, "--metric", "nf", "--out", profile])
        self.assertEqual(0, code)
        self.assertTrue(os.path.exists(profile))

    async def test_unknown_problem(self):
        out = self.path("results.csv")
        code = await main(["run", "--problems", "NOT_A_PROBLEM", "--out", out])
        self.assertEqual(2, code)
        self.assertFalse(os.path.exists(out))

    async def test_bad_dimension(self):
        out = self.path("results.csv")
        code = await main(["run", "--problems", "WOOD", "--dim", "WOOD=8", "--out", out])
        self.assertEqual(2, code)


if __name__ == "__main__":
    unittest.main()
