import sys
import os
import random
import unittest
from fractions import Fraction

# Add project root to sys.path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import sympy

from mld_tools.base import DimensionMismatchError, LatticeError
from mld_tools.lattice import (
    LatticeBasis,
    enumerate_residues,
    lattice_from_generators,
    lattice_member,
    primitive_generator,
    saturation_index,
    smith_normal_form,
    sublattice_index,
)

F = Fraction
HALF_DIAGONAL = lattice_from_generators([(1, 0), (0, 1), (F(1, 2), F(1, 2))])
KLEIN = lattice_from_generators(
    [(1, 0, 0), (0, 1, 0), (0, 0, 1), (F(1, 2), F(1, 2), 0), (0, F(1, 2), F(1, 2))]
)


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


class TestSmithNormalForm(unittest.TestCase):
    def assertDecomposition(self, M):
        S, U, V = smith_normal_form(M)
        self.assertEqual(_matmul(_matmul(U, M), V), [list(r) for r in S])
        self.assertIn(sympy.Matrix(U).det(), (1, -1))
        self.assertIn(sympy.Matrix(V).det(), (1, -1))
        for i, row in enumerate(S):
            for j, x in enumerate(row):
                if i != j:
                    self.assertEqual(x, 0)
        d = smith_normal_form(M).invariants
        for a, b in zip(d, d[1:]):
            if a:
                self.assertEqual(b % a, 0)
            else:
                self.assertEqual(b, 0)
        return d

    def test_identity(self):
        S, U, V = smith_normal_form([[1, 0], [0, 1]])
        self.assertEqual(S, ((1, 0), (0, 1)))

    def test_diagonal(self):
        self.assertEqual(self.assertDecomposition([[2, 0], [0, 3]]), (1, 6))

    def test_upper_triangular(self):
        # gcd of entries is 2 and |det| = 4, so the invariants are (2, 2)
        self.assertEqual(self.assertDecomposition([[2, 4], [0, 2]]), (2, 2))

    def test_rectangular_and_zero(self):
        self.assertEqual(self.assertDecomposition([[2, 4, 6]]), (2,))
        self.assertEqual(self.assertDecomposition([[0, 0], [0, 0]]), (0, 0))

    def test_negative_entries_give_nonnegative_invariants(self):
        self.assertEqual(self.assertDecomposition([[-3]]), (3,))
        self.assertEqual(self.assertDecomposition([[0, -4], [6, 0]]), (2, 12))
        self.assertEqual(self.assertDecomposition([[-2, 0, 0], [0, -2, 0], [0, 0, 1]]), (1, 2, 2))

    def test_random_matrices_against_determinant(self):
        rng = random.Random(7)
        for _ in range(40):
            n = rng.randint(1, 4)
            M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
            d = self.assertDecomposition(M)
            det = abs(sympy.Matrix(M).det())
            product = 1
            for x in d:
                product *= x
            self.assertEqual(product, det)


class TestLatticeBasis(unittest.TestCase):
    def test_singular_basis_rejected(self):
        with self.assertRaises(ValueError):
            LatticeBasis(basis=[(1, 2), (2, 4)])

    def test_coordinates_dimension(self):
        with self.assertRaises(DimensionMismatchError):
            LatticeBasis.standard(2).coordinates((1, 2, 3))

    def test_membership(self):
        self.assertTrue(lattice_member((1, 0), LatticeBasis.standard(2)))
        self.assertFalse(lattice_member((F(1, 2), F(1, 2)), LatticeBasis.standard(2)))
        basis = LatticeBasis(basis=[(1, 0), (F(1, 2), F(1, 2))])
        self.assertTrue(lattice_member((F(1, 2), F(1, 2)), basis))

    def test_generators(self):
        self.assertEqual(abs(HALF_DIAGONAL.determinant), F(1, 2))
        self.assertEqual(abs(KLEIN.determinant), F(1, 4))
        with self.assertRaises(LatticeError):
            lattice_from_generators([(1, 1), (2, 2)])


class TestPrimitiveGenerator(unittest.TestCase):
    def test_examples(self):
        Z2 = LatticeBasis.standard(2)
        self.assertEqual(primitive_generator((2, 0), Z2), (1, 0))
        self.assertEqual(primitive_generator((3, 6), Z2), (1, 2))
        self.assertEqual(primitive_generator((1, 0), HALF_DIAGONAL), (1, 0))
        self.assertEqual(primitive_generator((1, 1), HALF_DIAGONAL), (F(1, 2), F(1, 2)))

    def test_zero_vector(self):
        with self.assertRaises(LatticeError):
            primitive_generator((0, 0), LatticeBasis.standard(2))

    def test_minimality(self):
        rng = random.Random(11)
        for _ in range(30):
            v = (F(rng.randint(1, 12), rng.randint(1, 5)), F(rng.randint(0, 12), rng.randint(1, 5)))
            p = primitive_generator(v, HALF_DIAGONAL)
            self.assertTrue(lattice_member(p, HALF_DIAGONAL))
            t = p[0] / v[0]
            self.assertGreater(t, 0)
            self.assertEqual(p[1], t * v[1])
            for prime in (2, 3, 5, 7, 11):
                smaller = tuple(x / prime for x in p)
                self.assertFalse(lattice_member(smaller, HALF_DIAGONAL))


class TestResidues(unittest.TestCase):
    def test_trivial_quotient(self):
        Z2 = LatticeBasis.standard(2)
        self.assertEqual(enumerate_residues(Z2, Z2), [(0, 0)])

    def test_half_diagonal(self):
        residues = enumerate_residues(HALF_DIAGONAL, LatticeBasis.standard(2))
        self.assertEqual(residues, [(0, 0), (F(1, 2), F(1, 2))])

    def test_klein_four(self):
        residues = enumerate_residues(KLEIN, LatticeBasis.standard(3))
        half = F(1, 2)
        self.assertEqual(residues, [(0, 0, 0), (0, half, half), (half, 0, half), (half, half, 0)])

    def test_pairwise_differences_not_in_sublattice(self):
        L = lattice_from_generators([(1, 0, 0), (0, 1, 0), (0, 0, 1), (F(1, 7), F(2, 7), F(4, 7))])
        P = LatticeBasis.standard(3)
        residues = enumerate_residues(L, P)
        self.assertEqual(len(residues), sublattice_index(L, P))
        self.assertEqual(len(residues), 7)
        for i, a in enumerate(residues):
            for b in residues[i + 1:]:
                self.assertFalse(lattice_member(tuple(x - y for x, y in zip(a, b)), P))

    def test_sublattice_not_contained(self):
        with self.assertRaises(LatticeError):
            enumerate_residues(LatticeBasis.standard(2), LatticeBasis(basis=[(F(1, 2), 0), (0, 1)]))

    def test_saturation(self):
        self.assertEqual(saturation_index(HALF_DIAGONAL, [(1, 0)]), 1)
        self.assertEqual(saturation_index(HALF_DIAGONAL, [(1, 0), (0, 1)]), 2)
        self.assertEqual(saturation_index(KLEIN, [(1, 0, 0), (0, 1, 0)]), 2)


if __name__ == "__main__":
    unittest.main()
