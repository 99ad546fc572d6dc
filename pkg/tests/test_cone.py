import sys
import os
import unittest
from fractions import Fraction

# Add project root to sys.path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mld_tools.base import SmoothSingularityError, SpecificationError
from mld_tools.cone import (
    SimplicialConeData,
    functional,
    induced_cone,
    is_regular_subcone,
    mld_toric,
    primitive_rays,
    reduce_to_cyclic,
    scan_residues,
    toric_gorenstein_index,
)
from mld_tools.io import read_cone_file
from mld_tools.lattice import LatticeBasis
from mld_tools.quotient import QuotientType, Smooth, gorenstein_index, is_well_formed, mld, normalize, parse_quotient

F = Fraction
CONES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "cones")


def Q(text):
    return parse_quotient(text)


def cone_file(name):
    return read_cone_file(os.path.join(CONES, name))


def plain(rays):
    return SimplicialConeData(lattice=LatticeBasis.standard(len(rays)), rays=rays)


class TestConeData(unittest.TestCase):
    def test_rejects_dependent_rays(self):
        with self.assertRaises(ValueError):
            plain([(1, 1), (2, 2)])

    def test_rejects_ray_outside_lattice(self):
        with self.assertRaises(ValueError):
            plain([(F(1, 2), 0), (0, 1)])

    def test_rejects_wrong_ray_count(self):
        with self.assertRaises(ValueError):
            SimplicialConeData(lattice=LatticeBasis.standard(2), rays=[(1, 0)])

    def test_induced_cone_of_trivial_type(self):
        with self.assertRaises(SpecificationError):
            induced_cone(QuotientType.trivial())


class TestRaysAndFunctional(unittest.TestCase):
    def test_primitive_rays(self):
        self.assertEqual(primitive_rays(plain([(2, 0), (0, 3)])), [(1, 0), (0, 1)])
        self.assertEqual(primitive_rays(cone_file("cyclic_2_11.cone")), [(1, 0), (0, 1)])
        # 2·(1/4, 1/2) - (0, 1) = (1/2, 0)
        self.assertEqual(primitive_rays(induced_cone(Q("4:1,2"))), [(F(1, 2), 0), (0, 1)])

    def test_functional(self):
        self.assertEqual(functional(plain([(1, 0), (0, 1)])).coefficients, (1, 1))
        self.assertEqual(functional(plain([(2, 0), (0, 1)])).coefficients, (1, 1))
        self.assertEqual(functional(cone_file("z2xz2.cone")).coefficients, (1, 1, 1))
        F_ = functional(plain([(1, 0), (1, 2)]))
        self.assertEqual(F_.coefficients, (1, 0))
        self.assertEqual(F_((1, 2)), 1)

    def test_regular_subcones(self):
        self.assertTrue(is_regular_subcone(plain([(1, 0), (0, 1)]), [1, 2]))
        half = cone_file("cyclic_2_11.cone")
        self.assertFalse(is_regular_subcone(half, [1, 2]))
        self.assertTrue(is_regular_subcone(half, [1]))
        self.assertTrue(is_regular_subcone(half, [2]))
        klein = cone_file("z2xz2.cone")
        self.assertFalse(is_regular_subcone(klein, [1, 2]))
        self.assertTrue(is_regular_subcone(klein, [3]))

    def test_regular_subcone_index_range(self):
        half = cone_file("cyclic_2_11.cone")
        with self.assertRaises(SpecificationError):
            is_regular_subcone(half, [])
        with self.assertRaises(SpecificationError):
            is_regular_subcone(half, [0, 1])
        with self.assertRaises(SpecificationError):
            is_regular_subcone(half, [3])

    def test_gorenstein_index(self):
        self.assertEqual(toric_gorenstein_index(cone_file("cyclic_3_11.cone")), 3)
        self.assertEqual(toric_gorenstein_index(cone_file("cyclic_2_11.cone")), 1)
        self.assertEqual(toric_gorenstein_index(cone_file("z2xz2.cone")), 1)
        for text in ("5:1,2", "7:1,2,4", "9:1,2,4"):
            q = Q(text)
            self.assertEqual(toric_gorenstein_index(induced_cone(q)), gorenstein_index(q), msg=text)


class TestToricMld(unittest.TestCase):
    def test_smooth(self):
        self.assertIsInstance(mld_toric(cone_file("smooth.cone")), Smooth)
        self.assertIsInstance(mld_toric(plain([(2, 0), (0, 1)])), Smooth)
        # 1/6(2,3) is the affine plane after normalization
        self.assertIsInstance(mld_toric(induced_cone(Q("6:2,3"))), Smooth)

    def test_examples(self):
        result = mld_toric(cone_file("cyclic_2_11.cone"))
        self.assertEqual(result.mld_log, 1)
        self.assertEqual(result.witness, (F(1, 2), F(1, 2)))

        result = mld_toric(cone_file("z2xz2.cone"))
        self.assertEqual(result.mld_log, 1)
        self.assertEqual(result.witness, (0, F(1, 2), F(1, 2)))

        self.assertEqual(mld_toric(cone_file("cyclic_3_11.cone")).mld_log, F(2, 3))

        result = mld_toric(plain([(1, 0), (1, 2)]))
        self.assertEqual((result.mld_log, result.witness), (1, (1, 1)))

    def test_raw_type_gives_normalized_value(self):
        result = mld_toric(induced_cone(Q("4:1,2")))
        self.assertEqual(result.mld_log, 1)
        self.assertEqual(result.witness, (F(1, 4), F(1, 2)))

    def test_agrees_with_cyclic_quotients(self):
        for order in range(2, 10):
            for a in range(order):
                for b in range(1, order):
                    q = QuotientType(order=order, weights=(1, a, b))
                    reduced, _ = normalize(q)
                    toric = mld_toric(induced_cone(q))
                    cyclic = mld(reduced)
                    self.assertEqual(toric.is_smooth, cyclic.is_smooth, msg=str(q))
                    if not cyclic.is_smooth:
                        self.assertEqual(toric.mld_log, cyclic.mld_log, msg=str(q))

    def test_every_residue_competes(self):
        for cone in (cone_file("z2xz2.cone"), cone_file("cyclic_3_11.cone"), induced_cone(Q("12:1,4,6"))):
            records = scan_residues(cone)
            self.assertTrue(records)
            self.assertTrue(all(r.competes for r in records))
            for r in records:
                self.assertTrue(all(0 <= x < 1 for x in r.coords))
                self.assertEqual(r.value, sum(r.coords))


class TestReduction(unittest.TestCase):
    def test_examples(self):
        q, trace = reduce_to_cyclic(cone_file("cyclic_2_11.cone"))
        self.assertEqual(q, Q("2:1,1"))
        self.assertTrue(trace.verified)
        self.assertEqual(trace.support, (1, 2))

        q, trace = reduce_to_cyclic(cone_file("cyclic_3_11.cone"))
        self.assertEqual(q, Q("3:1,1"))
        self.assertEqual(trace.mld_log, F(2, 3))

    def test_klein_four_group(self):
        q, trace = reduce_to_cyclic(cone_file("z2xz2.cone"))
        self.assertEqual(q, Q("2:1,1"))
        self.assertEqual(trace.support, (2, 3))
        self.assertEqual(trace.raw, Q("2:1,1"))
        self.assertEqual(trace.mld_log, 1)

    def test_raw_witness_is_normalized(self):
        q, trace = reduce_to_cyclic(induced_cone(Q("4:1,2")))
        self.assertEqual(q, Q("2:1,1"))
        self.assertEqual(trace.raw, Q("2:1,1"))

    def test_smooth_rejected(self):
        with self.assertRaises(SmoothSingularityError) as cm:
            reduce_to_cyclic(cone_file("smooth.cone"))
        self.assertIn("minimal discrepancy undefined", str(cm.exception))

    def test_mld_preserved(self):
        for text in ("5:1,2", "7:1,2,4", "10:1,3,7", "12:1,5,7", "9:1,1,1"):
            q = Q(text)
            self.assertTrue(is_well_formed(q).ok, msg=text)
            reduced, trace = reduce_to_cyclic(induced_cone(q))
            self.assertEqual(mld(reduced).mld_log, mld(q).mld_log, msg=text)
            self.assertEqual(trace.mld_log, mld(q).mld_log, msg=text)


if __name__ == "__main__":
    unittest.main()
