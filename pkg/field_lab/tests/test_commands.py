import json
import os
import tempfile
from io import StringIO

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from field_lab.models import MetricLog, ScenarioRun


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def out_dir(self, name="out"):
        return os.path.join(self.tmp.name, name)

    def call(self, name, *args, out=None):
        stdout = StringIO()
        call_command(name, *args, "--out", out or self.out_dir(), stdout=stdout, verbosity=0)
        return stdout.getvalue()

    def read_table(self, name, out=None):
        return pd.read_csv(os.path.join(out or self.out_dir(), name), comment="#")

    def header_lines(self, name, out=None):
        with open(os.path.join(out or self.out_dir(), name), encoding="utf-8") as handle:
            return [line.rstrip("\n") for line in handle if line.startswith("#")]


class PropagateCommandTests(CommandTestCase):
    def test_hundred_steps_keep_the_energy(self):
        message = self.call("propagate", "--grid", "8", "--spacing", "0.5", "--steps", "100", "--dt", "0.01")
        self.assertIn("propagate: wrote", message)
        frame = self.read_table("propagate.csv")
        self.assertEqual(len(frame), 100)
        self.assertEqual(list(frame["step"]), list(range(1, 101)))
        self.assertLessEqual(frame["energy_drift"].max(), 1e-12)
        self.assertLessEqual(frame[["r1", "r2", "r3", "r4"]].to_numpy().max(), 1e-10)

    def test_provenance_header(self):
        self.call("propagate", "--grid", "8", "--spacing", "0.5", "--steps", "3", "--seed", "11")
        header = self.header_lines("propagate.csv")
        self.assertTrue(header[0].startswith("# tool=field-lab "))
        self.assertTrue(header[1].startswith("# config_hash="))
        self.assertEqual(len(header[1].split("=", 1)[1]), 64)
        self.assertEqual(header[2], "# seed=11")
        self.assertIn("# subcommand=propagate", header)
        with open(os.path.join(self.out_dir(), "propagate_summary.json"), encoding="utf-8") as handle:
            summary = json.load(handle)
        self.assertEqual(summary["provenance"]["seed"], 11)
        self.assertEqual(summary["provenance"]["config_hash"], header[1].split("=", 1)[1])

    def test_snapshots_follow_the_cadence(self):
        self.call("propagate", "--grid", "8", "--spacing", "0.5", "--steps", "4", "--cadence", "2")
        names = set(os.listdir(self.out_dir()))
        for step in (2, 4):
            for field in ("A", "E", "H"):
                self.assertIn(f"propagate_{step:06d}_{field}.bin", names)
                self.assertIn(f"propagate_{step:06d}_{field}.csv", names)
        self.assertNotIn("propagate_000001_A.bin", names)
        table = self.read_table("propagate_000002_E.csv")
        self.assertEqual(list(table.columns), ["x", "y", "z", "fx", "fy", "fz"])
        self.assertEqual(len(table), 512)

    def test_runs_are_reproducible(self):
        args = ("--grid", "8", "--spacing", "0.5", "--steps", "5", "--preset", "random-transverse", "--seed", "3")
        first, second = self.out_dir("first"), self.out_dir("second")
        self.call("propagate", *args, out=first)
        self.call("propagate", *args, "--threads", "2", out=second)
        self.assertEqual(sorted(os.listdir(first)), sorted(os.listdir(second)))
        for name in os.listdir(first):
            with open(os.path.join(first, name), "rb") as a, open(os.path.join(second, name), "rb") as b:
                self.assertEqual(a.read(), b.read(), name)


class ScenarioCommandTests(CommandTestCase):
    def test_fock(self):
        self.call("fock", "--nmax", "8", "--temperatures", "0.5,1,2")
        commutators = self.read_table("fock_commutators.csv")
        self.assertTrue(commutators["pass"].all())
        casimir = self.read_table("fock_casimir.csv")
        self.assertEqual(list(casimir["n"]), list(range(9)))
        self.assertLessEqual(casimir["error"].max(), 1e-12)
        self.assertEqual(len(self.read_table("fock_occupancy.csv")), 3)

    def test_majorana_compare(self):
        self.call("majorana", "--grid", "8", "--spacing", "0.5", "--steps", "10", "--compare")
        frame = self.read_table("majorana.csv")
        self.assertEqual(len(frame), 10)
        self.assertLessEqual(frame["divergence"].max(), 1e-10)

    def test_dual_trace_includes_the_start(self):
        self.call("dual", "--grid", "8", "--spacing", "0.5", "--steps", "10", "--cfl", "0.5")
        frame = self.read_table("dual.csv")
        self.assertEqual(list(frame["step"]), list(range(11)))
        with open(os.path.join(self.out_dir(), "dual_summary.json"), encoding="utf-8") as handle:
            summary = json.load(handle)["summary"]
        last = frame["field_energy"].iloc[-1]
        self.assertAlmostEqual(summary["field_energy_hl_last"] * 4.0 * np.pi / last, 1.0, places=12)
        self.assertEqual(summary["peak_rho_e_hl"], 0.0)

    def test_brackets(self):
        self.call("brackets", "--grid", "6", "--spacing", "0.5", "--states", "2", "--points", "3")
        frame = self.read_table("brackets.csv")
        self.assertTrue(frame["pass"].all())
        self.assertIn("canonical relations", set(frame["check"]))

    def test_clebsch_and_diag(self):
        self.call("clebsch", "--grid", "8", "--spacing", "0.5", "--preset", "random")
        checks = set(self.read_table("clebsch.csv")["check"])
        self.assertIn("curl identity", checks)
        self.assertTrue({"plane wave vector", "coulomb scalar"} <= checks)
        invariants = self.read_table("clebsch_invariants.csv")
        self.assertEqual(list(invariants.columns), ["potentials", "quantity", "value"])
        self.assertEqual(set(invariants["quantity"]), {"E2-H2", "E.H"})
        self.call("diag", "--grid", "8", "--spacing", "0.5", "--charges", "1,2,5")
        falloff = self.read_table("diag_falloff.csv")
        self.assertLessEqual(falloff["exponent_error"].max(), 1e-12)


class FailureTests(CommandTestCase):
    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as caught:
            self.call(name, *args)
        self.assertEqual(caught.exception.returncode, code)

    def test_malformed_config_writes_nothing(self):
        path = os.path.join(self.tmp.name, "bad.cfg")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("grid.n = lots\n")
        self.assertExitCode(1, "propagate", "--config", path)
        self.assertFalse(os.path.exists(self.out_dir()))

    def test_unknown_preset(self):
        self.assertExitCode(1, "propagate", "--grid", "8", "--spacing", "0.5", "--preset", "vortex")
        self.assertFalse(os.path.exists(self.out_dir()))

    def test_cfl_violation(self):
        self.assertExitCode(1, "dual", "--grid", "8", "--spacing", "0.5", "--cfl", "1.5")

    def test_bad_assignment(self):
        self.assertExitCode(1, "fock", "--set", "fock.n_max")
        self.assertExitCode(1, "fock", "--set", "fock.n_max=3")

    def test_failed_checks_still_write_outputs(self):
        self.assertExitCode(
            2, "brackets", "--grid", "6", "--spacing", "0.5", "--states", "1", "--points", "1", "--tolerance", "-1"
        )
        self.assertTrue(os.path.exists(os.path.join(self.out_dir(), "brackets.csv")))

    def test_the_cfl_limit_itself_is_invalid(self):
        self.assertExitCode(1, "dual", "--grid", "8", "--spacing", "0.5", "--cfl", "1.0")

    def test_dual_energy_drift_is_checked(self):
        self.assertExitCode(
            2, "dual", "--grid", "8", "--spacing", "0.5", "--steps", "5", "--cfl", "0.5",
            "--set", "dual.energy_tol=-1",
        )
        self.assertTrue(os.path.exists(os.path.join(self.out_dir(), "dual.csv")))

    def test_dual_static_sources_pass_the_gauss_check(self):
        for preset in ("static-charge", "static-monopole"):
            self.call("dual", "--grid", "8", "--spacing", "0.5", "--steps", "20", "--cfl", "0.5",
                      "--preset", preset, out=self.out_dir(preset))

    def test_clebsch_sweep_checks_the_order(self):
        self.assertExitCode(2, "clebsch", "--sweep", "--spacings", "0.4,0.4")
        self.assertTrue(os.path.exists(os.path.join(self.out_dir(), "clebsch_sweep.csv")))


class RecordTests(CommandTestCase):
    def test_record_stores_the_run(self):
        self.call("propagate", "--grid", "8", "--spacing", "0.5", "--steps", "2", "--record")
        run = ScenarioRun.objects.get()
        self.assertEqual(run.subcommand, "propagate")
        self.assertEqual(run.status, "ok")
        self.assertEqual(run.exit_code, 0)
        self.assertTrue(MetricLog.objects.filter(run=run, metric_type="energy").exists())

    def test_runs_are_not_recorded_by_default(self):
        self.call("fock", "--nmax", "4")
        self.assertFalse(ScenarioRun.objects.exists())
