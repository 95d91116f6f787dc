"""
Tests for configuration loading and logging setup
"""
import logging
import os
import sys
import tempfile
import unittest
from logging.handlers import RotatingFileHandler
from unittest import mock

# Add the src directory to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from utils.config import AppConfig, load_config, resolve_config_path
from utils.errors import ConfigError
from utils.logger import get_logger, setup_logger


class TestLoadConfig(unittest.TestCase):
    """Test cases for load_config"""

    def setUp(self):
        """Set up test fixtures"""
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up temporary files"""
        self.tmp.cleanup()

    def write(self, text: str) -> str:
        path = os.path.join(self.tmp.name, "config.yaml")
        with open(path, "w") as handle:
            handle.write(text)
        return path

    def test_defaults_without_file(self):
        """Test built-in defaults when no file is given"""
        config = load_config(None)
        self.assertEqual(config, AppConfig())
        self.assertEqual(config.simulation.seed, 7)
        self.assertEqual(config.sweep.family, "qubit-n")
        self.assertEqual((config.verify.d_min, config.verify.d_max), (2, 6))
        self.assertIsNone(config.logging.file_path)

    def test_partial_file(self):
        """Test that missing sections fall back to defaults"""
        config = load_config(self.write("sweep:\n  points: 50\n"))
        self.assertEqual(config.sweep.points, 50)
        self.assertEqual(config.sweep.trials, 2000)
        self.assertEqual(config.simulation.trials, 1000)

    def test_empty_file(self):
        """Test that an empty file yields defaults"""
        self.assertEqual(load_config(self.write("")), AppConfig())

    def test_example_file_loads(self):
        """Test that the shipped example configuration validates"""
        example = os.path.join(os.path.dirname(__file__), "..", "config.example.yaml")
        config = load_config(example)
        self.assertEqual(config.simulation.probe_count, 5)
        self.assertEqual(config.logging.level, "warning")

    def test_invalid_values(self):
        """Test that out-of-range values raise ConfigError"""
        for text in ("simulation:\n  trials: 0\n", "sweep:\n  family: spiral\n", "simulation:\n  probe_count: 2\n"):
            with self.subTest(text=text):
                with self.assertRaises(ConfigError):
                    load_config(self.write(text))

    def test_malformed_yaml(self):
        """Test that unparsable YAML raises ConfigError"""
        with self.assertRaises(ConfigError):
            load_config(self.write("simulation: [unclosed\n"))

    def test_missing_file(self):
        """Test that a missing explicit path raises ConfigError"""
        with self.assertRaises(ConfigError):
            load_config(os.path.join(self.tmp.name, "absent.yaml"))


class TestResolveConfigPath(unittest.TestCase):
    """Test cases for resolve_config_path"""

    def test_explicit_path_wins(self):
        """Test that --config beats the environment"""
        with mock.patch.dict(os.environ, {"CONFIG_PATH": "from_env.yaml"}):
            self.assertEqual(resolve_config_path("explicit.yaml"), "explicit.yaml")

    def test_environment_fallback(self):
        """Test CONFIG_PATH when no explicit path is given"""
        with mock.patch.dict(os.environ, {"CONFIG_PATH": "from_env.yaml"}):
            self.assertEqual(resolve_config_path(None), "from_env.yaml")

    def test_no_path(self):
        """Test None when neither is set"""
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertIsNone(resolve_config_path(None))


class TestLogger(unittest.TestCase):
    """Test cases for setup_logger"""

    def tearDown(self):
        """Restore console-only logging"""
        setup_logger(log_level="WARNING")

    def test_file_handler(self):
        """Test that a log file path adds a rotating file handler"""
        with tempfile.TemporaryDirectory() as tmp:
            log_file = os.path.join(tmp, "logs", "teleport.log")
            setup_logger(log_file, "DEBUG", max_size_mb=1, backup_count=2)
            handlers = logging.getLogger().handlers
            rotating = [h for h in handlers if isinstance(h, RotatingFileHandler)]
            self.assertEqual(len(rotating), 1)
            self.assertEqual(rotating[0].backupCount, 2)
            get_logger("tests").info("hello")
            rotating[0].flush()
            with open(log_file) as handle:
                self.assertIn("hello", handle.read())
            setup_logger(log_level="WARNING")

    def test_console_only(self):
        """Test that no file handler is added without a path"""
        setup_logger(None, "info")
        root = logging.getLogger()
        self.assertEqual(root.level, logging.INFO)
        self.assertFalse(any(isinstance(h, RotatingFileHandler) for h in root.handlers))


if __name__ == "__main__":
    unittest.main()
