"""
Tests for the command-line interface
"""
import csv
import json
import os
import sys
import tempfile
import unittest
from typing import List, Tuple

import numpy as np

# Add the src directory to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from cli.formatting import CSV_COLUMNS
from main import main

TRANSCRIPT_FIELDS = {
    "d",
    "lambda",
    "basis_kind",
    "outcome",
    "message_bits",
    "designated",
    "correction",
    "fidelity",
    "success",
    "seed",
    "generator",
}


class CliTestCase(unittest.TestCase):
    """Runs main() with output redirected to a temporary file"""

    def setUp(self):
        """Set up test fixtures"""
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, "out.txt")

    def tearDown(self):
        """Clean up temporary files"""
        self.tmp.cleanup()

    def run_cli(self, *argv: str) -> Tuple[int, str]:
        code = main(list(argv) + ["--out", self.out])
        text = ""
        if os.path.exists(self.out):
            with open(self.out) as handle:
                text = handle.read()
        return code, text

    def json_lines(self, text: str) -> List[dict]:
        return [json.loads(line) for line in text.splitlines() if line]


class TestTeleportCommand(CliTestCase):
    """Test cases for the teleport command"""

    def test_bell_pair_always_succeeds(self):
        """Test that a maximally entangled qubit pair succeeds every time"""
        code, text = self.run_cli(
            "teleport", "--d", "2", "--lambda", "uniform", "--basis", "bell", "--trials", "100", "--seed", "7"
        )
        self.assertEqual(code, 0)
        lines = self.json_lines(text)
        self.assertEqual(len(lines), 101)
        summary = lines[-1]["summary"]
        self.assertEqual(summary["empirical_p"], 1.0)
        self.assertEqual(summary["exact_p"], 1.0)
        for record in lines[:-1]:
            self.assertEqual(set(record), TRANSCRIPT_FIELDS)
            self.assertEqual(set(record["outcome"]), {"m", "slot"})
            self.assertEqual(len(record["message_bits"]), 2)
            self.assertEqual(record["generator"], "PCG64")
            self.assertTrue(record["success"])

    def test_qutrit_success_rate(self):
        """Test that the (1/2, 1/4, 1/4) pair succeeds with probability near 0.3"""
        trials = 5000
        code, text = self.run_cli(
            "teleport", "--d", "3", "--lambda", "0.5,0.25,0.25", "--basis", "nme",
            "--trials", str(trials), "--seed", "7",
        )
        self.assertEqual(code, 0)
        summary = self.json_lines(text)[-1]["summary"]
        self.assertAlmostEqual(summary["exact_p"], 0.3, places=10)
        self.assertLess(abs(summary["empirical_p"] - 0.3), 4 * np.sqrt(0.3 * 0.7 / trials))
        self.assertAlmostEqual(summary["repetitions_R"], 10 / 3, places=9)

    def test_rank_deficient_exit_code(self):
        """Test exit code 3 for a resource without full Schmidt rank"""
        code, _ = self.run_cli("teleport", "--d", "3", "--lambda", "1,0,0", "--basis", "nme")
        self.assertEqual(code, 3)

    def test_explicit_state(self):
        """Test teleporting a fixed qubit through the qubit basis"""
        code, text = self.run_cli(
            "teleport", "--lambda-from-n", "0.5", "--basis", "qubit-nme", "--qubit-choice", "3",
            "--state", "0.6,0.8j", "--trials", "50",
        )
        self.assertEqual(code, 0)
        lines = self.json_lines(text)
        self.assertEqual(lines[0]["basis_kind"], "qubit-nme")
        self.assertAlmostEqual(lines[-1]["summary"]["exact_p"], 0.32, places=10)

    def test_config_errors(self):
        """Test exit code 2 for malformed spectra, states and flags"""
        cases = [
            ("teleport", "--lambda", "0.5,abc"),
            ("teleport", "--d", "4", "--lambda", "0.5,0.5"),
            ("teleport", "--lambda", "uniform"),
            ("teleport", "--d", "2", "--state", "1,1"),
            ("teleport", "--d", "3", "--basis", "qubit-nme"),
            ("teleport", "--d", "3", "--l-choice", "0,1"),
            ("teleport", "--d", "2", "--trials", "0"),
            ("teleport", "--lambda", "0.5,0.5", "--lambda-from-n", "0.3"),
            ("teleport", "--basis", "cubic"),
        ]
        for argv in cases:
            with self.subTest(argv=argv):
                code, _ = self.run_cli(*argv)
                self.assertEqual(code, 2)

    def test_byte_identical_reruns(self):
        """Test that the same options and seed reproduce the output exactly"""
        argv = ("teleport", "--lambda", "0.4,0.35,0.25", "--trials", "60", "--seed", "3")
        _, first = self.run_cli(*argv)
        _, second = self.run_cli(*argv)
        self.assertEqual(first, second)


class TestSweepCommand(CliTestCase):
    """Test cases for the sweep command"""

    def read_rows(self, text: str) -> List[dict]:
        return list(csv.DictReader(text.splitlines()))

    def test_qubit_sweep(self):
        """Test 50 rows with the fixed header ending at P_succ = 0.5"""
        code, text = self.run_cli("sweep", "--family", "qubit-n", "--points", "50", "--trials", "20")
        self.assertEqual(code, 0)
        self.assertEqual(text.splitlines()[0], ",".join(CSV_COLUMNS))
        rows = self.read_rows(text)
        self.assertEqual(len(rows), 50)
        self.assertEqual(float(rows[-1]["p_succ_exact"]), 0.5)
        for row in rows:
            self.assertEqual(list(row), list(CSV_COLUMNS))
            self.assertEqual(len(row["lambda_spec"].split(";")), 2)

    def test_dirichlet_sweep_is_reproducible(self):
        """Test byte-identical CSV for a fixed seed"""
        argv = ("sweep", "--family", "dirichlet-random", "--d", "4", "--points", "3", "--trials", "30", "--seed", "2")
        _, first = self.run_cli(*argv)
        _, second = self.run_cli(*argv)
        self.assertEqual(first, second)

    def test_two_level_bound(self):
        """Test that all two-level qudit rows satisfy P_succ <= 1/5"""
        code, text = self.run_cli(
            "sweep", "--family", "two-level-qudit", "--d", "5", "--points", "3", "--trials", "20"
        )
        self.assertEqual(code, 0)
        for row in self.read_rows(text):
            self.assertLessEqual(float(row["p_succ_exact"]), 0.2 + 1e-12)

    def test_json_rows(self):
        """Test JSON-lines output of a sweep"""
        code, text = self.run_cli("sweep", "--points", "4", "--trials", "10", "--format", "json")
        self.assertEqual(code, 0)
        rows = self.json_lines(text)
        self.assertEqual(len(rows), 4)
        self.assertIn("p_succ_exact", rows[0])

    def test_qubit_family_needs_qubits(self):
        """Test exit code 2 for the qubit family at d = 3"""
        code, _ = self.run_cli("sweep", "--family", "qubit-n", "--d", "3", "--points", "2")
        self.assertEqual(code, 2)


class TestVerifyCommand(CliTestCase):
    """Test cases for the verify command"""

    def test_qubit_run_passes(self):
        """Test that d = 2 passes and includes the qubit groups"""
        code, text = self.run_cli("verify", "--d", "2", "--samples", "2", "--format", "json")
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertTrue(report["passed"])
        names = {check["name"] for check in report["checks"]}
        self.assertIn("qubit-correction-patterns", names)
        self.assertIn("qubit-success-probability", names)

    def test_tiny_tolerance_fails(self):
        """Test exit code 4 and reported errors under an impossible tolerance"""
        code, text = self.run_cli("verify", "--d", "2..3", "--samples", "2", "--tolerance", "1e-30")
        self.assertEqual(code, 4)
        self.assertIn("FAIL", text)
        self.assertIn("observed=", text)

    def test_bad_range(self):
        """Test exit code 2 for a malformed dimension range"""
        code, _ = self.run_cli("verify", "--d", "5..3")
        self.assertEqual(code, 2)


class TestBasisCommand(CliTestCase):
    """Test cases for the basis command"""

    def test_bell_dump(self):
        """Test four Bell vectors with one ebit each"""
        code, text = self.run_cli("basis", "--d", "2", "--kind", "bell")
        self.assertEqual(code, 0)
        dump = json.loads(text)
        self.assertEqual(len(dump["vectors"]), 4)
        for vector in dump["vectors"]:
            self.assertEqual(vector["entropy_bits"], 1.0)
            self.assertEqual(len(vector["amplitudes"]), 4)
            self.assertEqual(len(vector["amplitudes"][0]), 2)

    def test_qubit_nme_dump(self):
        """Test that designated qubit vectors carry the resource entanglement"""
        code, text = self.run_cli("basis", "--d", "2", "--lambda-from-n", "0.7", "--kind", "nme")
        self.assertEqual(code, 0)
        dump = json.loads(text)
        lambdas = np.array(dump["lambda"])
        resource_bits = float(-np.sum(lambdas * np.log2(lambdas)))
        designated = [v for v in dump["vectors"] if v["designated"]]
        self.assertEqual(len(designated), 2)
        for vector in designated:
            self.assertAlmostEqual(vector["entropy_bits"], resource_bits, places=9)

    def test_qutrit_dump(self):
        """Test 3 designated and 6 filler vectors for d = 3"""
        code, text = self.run_cli("basis", "--d", "3", "--lambda", "0.5,0.25,0.25", "--kind", "nme")
        self.assertEqual(code, 0)
        dump = json.loads(text)
        self.assertEqual(dump["designated_count"], 3)
        self.assertEqual(sum(1 for v in dump["vectors"] if not v["designated"]), 6)


class TestConfigFile(CliTestCase):
    """Test cases for configuration handling in the CLI"""

    def test_config_supplies_defaults(self):
        """Test that trials and seed come from the YAML file"""
        config_path = os.path.join(self.tmp.name, "config.yaml")
        with open(config_path, "w") as handle:
            handle.write("simulation:\n  trials: 12\n  seed: 3\n")
        code, text = self.run_cli("teleport", "--d", "2", "--config", config_path)
        self.assertEqual(code, 0)
        self.assertEqual(self.json_lines(text)[-1]["summary"]["trials"], 12)

    def test_missing_config_file(self):
        """Test exit code 2 for a config path that does not exist"""
        missing = os.path.join(self.tmp.name, "missing.yaml")
        code, _ = self.run_cli("teleport", "--d", "2", "--config", missing)
        self.assertEqual(code, 2)


if __name__ == "__main__":
    unittest.main()
