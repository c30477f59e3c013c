import numpy as np
import pytest

from rotform import (
    DEFAULT_TOL,
    InputError,
    ToleranceConfig,
    nullspace,
    principal_minor_sums,
    random_orthogonal,
    real_spectrum,
    sym_eigen,
)
from rotform.linalg import char_poly_coeffs

from oracles import (
    char_poly_by_permutations,
    jordan_shear,
    minor_sum_by_enumeration,
    row_reduce_rank,
)


class TestSymEigen:
    def test_already_diagonal(self):
        w, P = sym_eigen(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(w, [1.0, 2.0, 3.0])
        # eigenvectors are the basis vectors, permuted to ascending order
        np.testing.assert_allclose(np.abs(P), np.eye(3)[:, [1, 2, 0]], atol=1e-14)

    def test_exchange_matrix(self):
        w, P = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
        inv = np.array([1.0, -1.0]) / np.sqrt(2.0)
        sym = np.array([1.0, 1.0]) / np.sqrt(2.0)
        assert min(np.linalg.norm(P[:, 0] - inv), np.linalg.norm(P[:, 0] + inv)) < 1e-12
        assert min(np.linalg.norm(P[:, 1] - sym), np.linalg.norm(P[:, 1] + sym)) < 1e-12

    def test_reconstruction_residual_5x5(self):
        rng = np.random.default_rng(11)
        M = rng.standard_normal((5, 5))
        Q = M + M.T
        w, P = sym_eigen(Q)
        residual = np.linalg.norm(P @ np.diag(w) @ P.T - Q) / np.linalg.norm(Q)
        assert residual < 1e-10

    def test_matches_library_eigensolver(self):
        rng = np.random.default_rng(12)
        M = rng.standard_normal((6, 6))
        Q = M + M.T
        w, _ = sym_eigen(Q)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(Q), atol=1e-10)

    def test_bulk_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            M = rng.standard_normal((n, n))
            Q = M + M.T
            w, P = sym_eigen(Q)
            scale = np.linalg.norm(Q) or 1.0
            assert np.linalg.norm(P @ np.diag(w) @ P.T - Q) / scale < 1e-10
            assert np.max(np.abs(P.T @ P - np.eye(n))) < 1e-10

    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            sym_eigen(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            sym_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_zero_and_scalar(self):
        w, P = sym_eigen(np.zeros((3, 3)))
        np.testing.assert_allclose(w, np.zeros(3))
        w, P = sym_eigen(np.array([[4.0]]))
        np.testing.assert_allclose(w, [4.0])


class TestRealSpectrum:
    def test_pure_rotation(self):
        spec = real_spectrum(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert spec.real_eigs == ()
        assert len(spec.complex_pairs) == 1
        z, mult = spec.complex_pairs[0]
        assert mult == 1
        np.testing.assert_allclose([z.real, z.imag], [0.0, 1.0], atol=1e-12)

    def test_diagonal(self):
        spec = real_spectrum(np.diag([1.0, 2.0, 3.0]))
        assert [m for _, m in spec.real_eigs] == [1, 1, 1]
        np.testing.assert_allclose([v for v, _ in spec.real_eigs], [1.0, 2.0, 3.0], atol=1e-12)

    def test_companion_double_root(self):
        # companion matrix of (x - 1)^2 (x + 2) = x^3 - 3x + 2
        C = np.array([[0.0, 0.0, -2.0], [1.0, 0.0, 3.0], [0.0, 1.0, 0.0]])
        spec = real_spectrum(C)
        assert spec.complex_pairs == ()
        values = {round(v, 6): m for v, m in spec.real_eigs}
        assert values == {1.0: 2, -2.0: 1}
        for v, _ in spec.real_eigs:
            assert abs(v - round(v)) < 1e-10

    def test_multiplicities_sum_and_poly_residual(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            n = int(rng.integers(2, 8))
            A = rng.uniform(-1.0, 1.0, (n, n))
            spec = real_spectrum(A)
            assert spec.total_multiplicity() == n
            coeffs = char_poly_coeffs(A)
            bound = 1e-8 * np.max(np.abs(coeffs))
            for lam, _ in spec.real_eigs:
                assert abs(np.polyval(coeffs, lam)) < bound

    def test_matches_library_eigenvalues(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            A = rng.uniform(-1.0, 1.0, (n, n))
            spec = real_spectrum(A)
            mine = sorted(v for v, m in spec.real_eigs for _ in range(m))
            ref = sorted(x.real for x in np.linalg.eigvals(A) if abs(x.imag) < 1e-9)
            assert len(mine) == len(ref)
            np.testing.assert_allclose(mine, ref, atol=1e-8)


class TestNullspace:
    def test_identity_has_trivial_kernel(self):
        assert nullspace(np.eye(3)) == []

    def test_zero_matrix_full_kernel(self):
        vecs = nullspace(np.zeros((3, 3)))
        assert len(vecs) == 3

    def test_shear_example_eigenspace_dimension(self):
        A = jordan_shear(3.0, 1.0)
        shifted = A - 3.0 * np.eye(3)
        vecs = nullspace(shifted)
        assert len(vecs) == 1
        assert 3 - row_reduce_rank(shifted) == 1

    def test_vectors_are_orthonormal_kernel_members(self):
        rng = np.random.default_rng(31)
        V = rng.standard_normal((4, 2))
        A = V @ V.T  # rank 2 in dimension 4
        vecs = nullspace(A, abs_threshold=1e-9)
        assert len(vecs) == 2
        G = np.array([[float(a @ b) for b in vecs] for a in vecs])
        np.testing.assert_allclose(G, np.eye(2), atol=1e-12)
        for v in vecs:
            assert np.linalg.norm(A @ v) < 1e-9


class TestPrincipalMinorSums:
    def test_identity(self):
        np.testing.assert_allclose(principal_minor_sums(np.eye(3)), (3.0, 3.0, 1.0))

    def test_two_by_two(self):
        np.testing.assert_allclose(principal_minor_sums(np.array([[1.0, 2.0], [3.0, 4.0]])),
                                   (5.0, -2.0))

    def test_against_cofactor_char_poly(self):
        rng = np.random.default_rng(41)
        A = rng.uniform(-1.0, 1.0, (4, 4))
        ref = char_poly_by_permutations(A)
        np.testing.assert_allclose(char_poly_coeffs(A), ref, atol=1e-12)

    def test_against_minor_enumeration(self):
        rng = np.random.default_rng(42)
        for n in (2, 3, 4, 5):
            A = rng.uniform(-1.0, 1.0, (n, n))
            pm = principal_minor_sums(A)
            for k in range(1, n + 1):
                assert abs(pm[k - 1] - minor_sum_by_enumeration(A, k)) < 1e-10

    def test_basis_invariance(self):
        rng = np.random.default_rng(43)
        for trial in range(20):
            n = int(rng.integers(2, 7))
            A = rng.uniform(-1.0, 1.0, (n, n))
            P = random_orthogonal(n, seed=trial)
            pm1 = np.array(principal_minor_sums(A))
            pm2 = np.array(principal_minor_sums(P.T @ A @ P))
            np.testing.assert_allclose(pm1, pm2, rtol=1e-9, atol=1e-9)

    def test_trace_and_determinant_endpoints(self):
        rng = np.random.default_rng(44)
        A = rng.uniform(-1.0, 1.0, (5, 5))
        pm = principal_minor_sums(A)
        assert pm[0] == pytest.approx(np.trace(A), abs=1e-13)
        assert pm[-1] == pytest.approx(np.linalg.det(A), rel=1e-10, abs=1e-12)


class TestRandomOrthogonal:
    def test_dimension_one(self):
        P = random_orthogonal(1, seed=5)
        assert abs(abs(P[0, 0]) - 1.0) < 1e-15

    def test_orthogonality(self):
        P = random_orthogonal(4, seed=7)
        assert np.max(np.abs(P.T @ P - np.eye(4))) < 1e-12
        assert abs(abs(np.linalg.det(P)) - 1.0) < 1e-10

    def test_determinism(self):
        np.testing.assert_array_equal(random_orthogonal(6, seed=99), random_orthogonal(6, seed=99))

    def test_rejects_bad_dimension(self):
        with pytest.raises(InputError):
            random_orthogonal(0, seed=1)


class TestToleranceConfig:
    def test_rejects_nonpositive(self):
        with pytest.raises(InputError):
            ToleranceConfig(eig_off_tol=0.0)

    def test_defaults(self):
        assert DEFAULT_TOL.residual_tol == 1e-9
