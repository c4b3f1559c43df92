import logging
import os
import unittest
from unittest import mock

from modules.config import Config, _int_env
from modules.errors import DomainError, GeodeticError, InconsistencyError, ParseError, ResourceLimitError
from modules.logger import PACKAGE_LOGGER, get_logger, setup_logger


class TestConfig(unittest.TestCase):
    def test_int_env(self):
        with mock.patch.dict(os.environ, {"X_BITS": "2**64", "Y_BITS": "1_000", "Z_BITS": ""}):
            self.assertEqual(_int_env("X_BITS", 1), 2 ** 64)
            self.assertEqual(_int_env("Y_BITS", 1), 1000)
            self.assertEqual(_int_env("Z_BITS", 7), 7)

    def test_validation(self):
        with self.assertRaises(DomainError):
            Config(precision_bits=32)
        with self.assertRaises(DomainError):
            Config(output="yaml")
        with self.assertRaises(DomainError):
            Config(factor_limit=1)

    def test_overrides(self):
        base = Config(precision_bits=256, output="text")
        self.assertEqual(base.with_overrides(precision_bits=None, output="json"),
                         Config(precision_bits=256, factor_limit=base.factor_limit, output="json"))
        with self.assertRaises(DomainError):
            base.with_overrides(precision_bits=10)


class TestErrors(unittest.TestCase):
    def test_kinds_and_exit_codes(self):
        cases = [(ParseError, "parse", 1), (DomainError, "domain", 1),
                 (ResourceLimitError, "resource", 2), (InconsistencyError, "internal", 3)]
        for cls, kind, code in cases:
            err = cls("boom")
            self.assertIsInstance(err, GeodeticError)
            self.assertIsInstance(err, ValueError)
            self.assertEqual((err.kind, err.exit_code), (kind, code))
            self.assertEqual(err.to_dict(), {"error": {"kind": kind, "detail": "boom"}})


class TestLogger(unittest.TestCase):
    def test_names_live_under_package(self):
        self.assertEqual(get_logger("modules.arith").name, "modules.arith")
        self.assertEqual(get_logger("__main__").name, f"{PACKAGE_LOGGER}.__main__")

    def test_setup_is_idempotent(self):
        first = setup_logger(debug=False, level="warning")
        second = setup_logger(debug=False, level="warning")
        self.assertIs(first, second)
        self.assertEqual(len(second.handlers), 1)
        self.assertEqual(second.level, logging.WARNING)
        setup_logger(debug=False)


if __name__ == "__main__":
    unittest.main()
