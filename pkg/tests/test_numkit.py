"""
Tests for the complex matrix toolkit and the seed streams
"""

import unittest

import numpy as np
from numpy.testing import assert_allclose

from utils.errors import DimensionError, NormError
from utils.numkit import (
    ORDER_DESCENDING, assemble, householder_step, householder_transition, reorthonormalize, svd,
    transport_step, unitarity_error,
)
from utils.seeding import StreamFactory


def random_unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_matrix(rng, n, m):
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


class TestHouseholder(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_maps_previous_onto_next(self):
        """Test that the transition carries u_prev onto u_next and stays unitary"""
        for n in (2, 3, 4, 8):
            a, b = random_unit(self.rng, n), random_unit(self.rng, n)
            T = householder_transition(a, b)
            assert_allclose(T @ a, b, atol=1e-12)
            self.assertLess(unitarity_error(T), 1e-12)

    def test_identical_vectors_give_identity(self):
        """Test that a zero step returns the identity"""
        a = random_unit(self.rng, 4)
        assert_allclose(householder_transition(a, a), np.eye(4), atol=0)

    def test_rejects_bad_inputs(self):
        """Test that non-unit and mismatched vectors are refused"""
        a = random_unit(self.rng, 4)
        with self.assertRaises(NormError):
            householder_transition(a * 2, a)
        with self.assertRaises(DimensionError):
            householder_transition(a, random_unit(self.rng, 3))
        with self.assertRaises(NormError):
            householder_transition(np.full(2, np.nan), np.array([1.0, 0.0]))

    def test_rank_one_step_matches_full_transition(self):
        """Test that householder_step equals T @ U"""
        a, b = random_unit(self.rng, 4), random_unit(self.rng, 4)
        U = svd(random_matrix(self.rng, 4, 4)).U
        assert_allclose(householder_step(U, a, b), householder_transition(a, b) @ U, atol=1e-12)

    def test_chain_stays_unitary(self):
        """Test that a long chain of small steps keeps the matrix unitary"""
        U = np.eye(4, dtype=np.complex128)
        prev = U[:, 0].copy()
        for _ in range(500):
            nxt = prev + 0.05 * random_unit(self.rng, 4)
            nxt /= np.linalg.norm(nxt)
            U = householder_step(U, prev, nxt)
            prev = nxt
        self.assertLess(unitarity_error(U), 1e-10)
        assert_allclose(U[:, 0], prev, atol=1e-10)

    def test_long_chain_without_reorthonormalization(self):
        """Test that thousands of small steps add no more than rounding-level non-unitarity"""
        U = np.eye(4, dtype=np.complex128)
        prev = U[:, 0].copy()
        for _ in range(5000):
            nxt = prev + 0.01 * random_unit(self.rng, 4)
            nxt /= np.linalg.norm(nxt)
            U = householder_step(U, prev, nxt)
            prev = nxt
        self.assertLess(unitarity_error(U), 1e-11)

    def test_transport_step_keeps_the_determinant(self):
        """Test that the phase-fixed step maps column one and leaves det(U) unchanged"""
        for n in (2, 3, 4):
            with self.subTest(n=n):
                U = svd(random_matrix(self.rng, n, n)).U
                a = U[:, 0].copy()
                b = a + 0.05 * random_unit(self.rng, n)
                b /= np.linalg.norm(b)
                moved = transport_step(U, a, b)
                assert_allclose(moved[:, 0], b, atol=1e-12)
                self.assertLess(unitarity_error(moved), 1e-12)
                self.assertAlmostEqual(abs(np.linalg.det(moved) - np.linalg.det(U)), 0.0, delta=1e-12)
                # a plain Householder step changes det by -conj(z)/z
                self.assertGreater(abs(np.linalg.det(householder_step(U, a, b)) - np.linalg.det(U)), 1e-3)

    def test_transport_step_is_close_to_identity_for_small_moves(self):
        """Test that a tiny move of column one barely changes the other columns"""
        U = svd(random_matrix(self.rng, 4, 4)).U
        a = U[:, 0].copy()
        b = a + 1e-6 * random_unit(self.rng, 4)
        b /= np.linalg.norm(b)
        self.assertLess(np.max(np.abs(transport_step(U, a, b) - U)), 1e-5)


class TestSvd(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_reconstructs_square_and_rectangular(self):
        """Test that U S V^H reproduces H for square and rectangular inputs"""
        for n, m in ((2, 2), (4, 4), (4, 2), (2, 4), (8, 8)):
            H = random_matrix(self.rng, n, m)
            triple = svd(H)
            self.assertEqual(triple.U.shape, (n, n))
            self.assertEqual(triple.V.shape, (m, m))
            assert_allclose(assemble(triple.U, triple.S, triple.V), H, atol=1e-10)
            self.assertLess(unitarity_error(triple.U), 1e-10)
            self.assertLess(unitarity_error(triple.V), 1e-10)

    def test_descending_values_match_numpy(self):
        """Test that singular values are sorted and agree with numpy"""
        H = random_matrix(self.rng, 4, 4)
        values = svd(H, order=ORDER_DESCENDING).values
        self.assertTrue(np.all(np.diff(values) <= 0))
        assert_allclose(values, np.linalg.svd(H, compute_uv=False), rtol=1e-10)

    def test_rank_deficient(self):
        """Test that a rank-one matrix yields one zero singular value and a full unitary U"""
        a, b = random_unit(self.rng, 3), random_unit(self.rng, 3)
        H = 2.0 * np.outer(a, b.conj())
        triple = svd(H)
        assert_allclose(triple.values, [2.0, 0.0, 0.0], atol=1e-10)
        self.assertLess(unitarity_error(triple.U), 1e-10)
        assert_allclose(assemble(triple.U, triple.S, triple.V), H, atol=1e-10)

    def test_phase_gauge_is_repeatable(self):
        """Test that the first nonzero entry of every V column is real and positive"""
        V = svd(random_matrix(self.rng, 4, 4)).V
        for k in range(4):
            self.assertAlmostEqual(V[0, k].imag, 0.0, places=12)
            self.assertGreater(V[0, k].real, 0.0)

    def test_size_limit(self):
        """Test that matrices above 8x8 are refused"""
        with self.assertRaises(DimensionError):
            svd(np.eye(9))


class TestHelpers(unittest.TestCase):
    def test_unitarity_error_on_stack(self):
        """Test that unitarity_error accepts a stack of matrices"""
        stack = np.stack([np.eye(3), np.eye(3)])
        self.assertEqual(unitarity_error(stack), 0.0)
        stack[1, 0, 0] = 1.5
        self.assertAlmostEqual(unitarity_error(stack), 1.25)

    def test_assemble_checks_shapes(self):
        """Test that assemble refuses mismatched factors"""
        with self.assertRaises(DimensionError):
            assemble(np.eye(2), np.zeros((2, 3)), np.eye(2))

    def test_reorthonormalize_keeps_first_direction(self):
        """Test that re-orthonormalization restores unitarity and keeps column one's direction"""
        rng = np.random.default_rng(3)
        U = svd(random_matrix(rng, 4, 4)).U
        drifted = U + 1e-6 * random_matrix(rng, 4, 4)
        fixed = reorthonormalize(drifted)
        self.assertLess(unitarity_error(fixed), 1e-12)
        first = drifted[:, 0] / np.linalg.norm(drifted[:, 0])
        assert_allclose(fixed[:, 0], first, atol=1e-14)


class TestStreamFactory(unittest.TestCase):
    def test_same_key_same_draws(self):
        """Test that a key path always yields the same stream"""
        a = StreamFactory(5).generator("u", "element", 1).standard_normal(4)
        b = StreamFactory(5).generator("u", "element", 1).standard_normal(4)
        assert_allclose(a, b, atol=0)

    def test_child_prefix_equals_full_key(self):
        """Test that a child factory addresses the same streams as the full key"""
        a = StreamFactory(5).child("u").generator("element", 1).random(3)
        b = StreamFactory(5).generator("u", "element", 1).random(3)
        assert_allclose(a, b, atol=0)

    def test_keys_are_independent(self):
        """Test that different keys and seeds give different draws"""
        base = StreamFactory(5).generator("mode", 0).random(3)
        self.assertFalse(np.array_equal(base, StreamFactory(5).generator("mode", 1).random(3)))
        self.assertFalse(np.array_equal(base, StreamFactory(6).generator("mode", 0).random(3)))

    def test_negative_seed_rejected(self):
        """Test that negative seeds are refused"""
        with self.assertRaises(ValueError):
            StreamFactory(-1)


if __name__ == '__main__':
    unittest.main()
