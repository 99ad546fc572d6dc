import sys
import os
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to sys.path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mld_tools.base import LatticeError, ParseError, PersistenceError
from mld_tools.io import (
    SpectrumRow,
    format_cone,
    parse_cone_text,
    read_cone_file,
    spectrum_from_csv,
    spectrum_from_json,
    spectrum_to_json,
    write_cone_file,
)
from mld_tools.quotient import SingularityClass

F = Fraction

KLEIN = """\
# (Z/2)^2
dim 3
generators
1 0 0
0 1 0
0 0 1
1/2 1/2 0   # first involution
0 1/2 1/2
rays
1 0 0
0 1 0
0 0 1
"""


class TestConeText(unittest.TestCase):
    def test_generators(self):
        cone = parse_cone_text(KLEIN)
        self.assertEqual(cone.dimension, 3)
        self.assertEqual(abs(cone.lattice.determinant), F(1, 4))

    def test_standard_lattice_by_default(self):
        cone = parse_cone_text("dim 2\nrays\n1 0\n1 2\n")
        self.assertEqual(cone.lattice.basis, ((1, 0), (0, 1)))
        self.assertEqual(cone.rays, ((1, 0), (1, 2)))

    def test_lattice_basis(self):
        cone = parse_cone_text("dim 2\nlattice\n1/2 1/2\n0 1\nrays\n1 0\n0 1\n")
        self.assertEqual(abs(cone.lattice.determinant), F(1, 2))

    def test_syntax_errors(self):
        cases = {
            "dim 2\nrays\n1 0.5\n0 1\n": 3,
            "rays\n1 0\n0 1\n": 1,
            "dim 2\nrays\n1 0 0\n0 1\n": 3,
            "dim 2\nrays\n1 0\n0 1\n1 1\n": 5,
            "dim 2\n1 0\n": 2,
        }
        for text, line in cases.items():
            with self.assertRaises(ParseError, msg=text) as cm:
                parse_cone_text(text)
            self.assertEqual(cm.exception.line, line, msg=text)

    def test_missing_parts(self):
        with self.assertRaises(ParseError):
            parse_cone_text("# nothing here\n")
        with self.assertRaises(ParseError):
            parse_cone_text("dim 2\nrays\n1 0\n")
        with self.assertRaises(ParseError):
            parse_cone_text("dim 2\nlattice\n1 0\n0 1\ngenerators\n1 0\n0 1\nrays\n1 0\n0 1\n")

    def test_lattice_errors(self):
        bad = (
            "dim 2\nrays\n1 1\n2 2\n",                       # degenerate rays
            "dim 2\nlattice\n1 2\n2 4\nrays\n1 0\n0 1\n",    # singular basis
            "dim 2\nrays\n1/2 0\n0 1\n",                     # ray outside the lattice
            "dim 2\ngenerators\n1 1\n2 2\nrays\n1 0\n0 1\n", # generators of lower rank
        )
        for text in bad:
            with self.assertRaises(LatticeError, msg=text):
                parse_cone_text(text)

    def test_file_round_trip(self):
        cone = parse_cone_text(KLEIN)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "klein.cone"
            write_cone_file(cone, path)
            again = read_cone_file(path)
        self.assertEqual(again.rays, cone.rays)
        self.assertEqual(format_cone(again), format_cone(cone))
        self.assertEqual(again.lattice.determinant, cone.lattice.determinant)

    def test_missing_file(self):
        with self.assertRaises(PersistenceError):
            read_cone_file(Path("/nonexistent/dir/x.cone"))


class TestSpectrumText(unittest.TestCase):
    ROW = SpectrumRow(
        dim=2, order=5, weights=(1, 2), mld_log=F(3, 5),
        singularity_class=SingularityClass.KLT_NOT_CANONICAL, index=5, multiplicity=1,
    )

    def test_json_form(self):
        text = spectrum_to_json([self.ROW])
        self.assertIn('"mld_log": "3/5"', text)
        self.assertEqual(spectrum_from_json(text), [self.ROW])

    def test_json_rejects_numbers_for_mld(self):
        text = '[{"dim": 2, "N": 5, "weights": [1, 2], "mld_log": 0.6, "class": "klt-not-canonical", ' \
               '"index": 5, "multiplicity": 1}]'
        with self.assertRaises(ParseError) as cm:
            spectrum_from_json(text)
        self.assertIn("entry 1", str(cm.exception))

    def test_json_rejects_float_integers(self):
        text = '[{"dim": 2, "N": 5.0, "weights": [1, 2], "mld_log": "3/5", "class": "klt-not-canonical", ' \
               '"index": 5, "multiplicity": 1}]'
        with self.assertRaises(ParseError):
            spectrum_from_json(text)

    def test_csv_header_and_columns(self):
        with self.assertRaises(ParseError):
            spectrum_from_csv("dim,N\n")
        with self.assertRaises(ParseError):
            spectrum_from_csv("")
        header = "dim,N,weights,mld_num,mld_den,class,index,multiplicity\n"
        with self.assertRaises(ParseError) as cm:
            spectrum_from_csv(header + "2,5\n")
        self.assertEqual(cm.exception.line, 2)
        with self.assertRaises(ParseError) as cm:
            spectrum_from_csv(header + '3,5,"1,2",3,5,klt-not-canonical,5,1\n')
        self.assertEqual(cm.exception.line, 2)
        with self.assertRaises(ParseError):
            spectrum_from_csv(header + '2,5,"1,2",3,5,log-terminal,5,1\n')


if __name__ == "__main__":
    unittest.main()
