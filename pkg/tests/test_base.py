import sys
import os
import unittest
from fractions import Fraction
from pathlib import Path
from unittest import mock

# Add project root to sys.path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mld_tools.base import (
    CommandContext,
    MldError,
    ParseError,
    SpecificationError,
    VerificationError,
    parse_integer,
    parse_rational,
    render_rational,
    resolve_path,
)
from mld_tools.config import load_settings


class TestRationals(unittest.TestCase):
    def test_render(self):
        self.assertEqual(render_rational(Fraction(3, 5)), "3/5")
        self.assertEqual(render_rational(Fraction(-2, 5)), "-2/5")
        self.assertEqual(render_rational(Fraction(4, 2)), "2")
        self.assertEqual(render_rational(0), "0")

    def test_parse_accepts_exact_literals(self):
        self.assertEqual(parse_rational("3/5"), Fraction(3, 5))
        self.assertEqual(parse_rational("-7"), Fraction(-7))
        self.assertEqual(parse_rational(" 4/6 "), Fraction(2, 3))

    def test_parse_rejects_floats(self):
        for text in ("0.5", "1e3", "1/2.0", "", "1/", "a/b"):
            with self.assertRaises(ParseError, msg=text):
                parse_rational(text)

    def test_zero_denominator(self):
        with self.assertRaises(ParseError):
            parse_rational("1/0")

    def test_line_number_in_message(self):
        with self.assertRaises(ParseError) as cm:
            parse_rational("0.25", line=7)
        self.assertEqual(cm.exception.line, 7)
        self.assertTrue(str(cm.exception).startswith("line 7: "))

    def test_parse_integer(self):
        self.assertEqual(parse_integer("42"), 42)
        with self.assertRaises(ParseError):
            parse_integer("3/1")


class TestErrorsAndContext(unittest.TestCase):
    def test_exit_codes(self):
        self.assertEqual(ParseError("x").exit_code, 2)
        self.assertEqual(SpecificationError("x").exit_code, 2)
        self.assertEqual(VerificationError("x").exit_code, 1)
        self.assertTrue(issubclass(VerificationError, MldError))

    def test_resolve_path(self):
        root = Path("/work")
        self.assertEqual(resolve_path("spectra/dim2.csv", root), Path("/work/spectra/dim2.csv").resolve())
        self.assertEqual(resolve_path("/tmp/x.csv", root), Path("/tmp/x.csv").resolve())

    def test_context_rejects_zero_workers(self):
        with self.assertRaises(ValueError):
            CommandContext(workers=0)


class TestSettings(unittest.TestCase):
    def test_defaults(self):
        env = {"MLD_LOG_LEVEL": "", "MLD_WORKERS": "", "MLD_JSON_INDENT": "", "MLD_LOG_DIR": ""}
        with mock.patch.dict(os.environ, env):
            os.environ.pop("MLD_LOG_LEVEL")
            settings = load_settings()
        self.assertEqual(settings.log_level, "WARNING")
        self.assertEqual(settings.workers, 1)
        self.assertIsNone(settings.json_indent)
        self.assertIsNone(settings.log_dir)

    def test_values(self):
        env = {"MLD_LOG_LEVEL": "debug", "MLD_WORKERS": "3", "MLD_JSON_INDENT": "2"}
        with mock.patch.dict(os.environ, env):
            settings = load_settings()
        self.assertEqual(settings.log_level, "DEBUG")
        self.assertEqual(settings.workers, 3)
        self.assertEqual(settings.json_indent, 2)

    def test_invalid_values(self):
        with mock.patch.dict(os.environ, {"MLD_WORKERS": "many"}):
            with self.assertRaises(SpecificationError):
                load_settings()
        with mock.patch.dict(os.environ, {"MLD_LOG_LEVEL": "LOUD"}):
            with self.assertRaises(SpecificationError):
                load_settings()


if __name__ == "__main__":
    unittest.main()
