import numpy as np
import pytest

from rotform import (
    InputError,
    cayley_hamilton_residual,
    ch_form_residuals,
    ch_trace_residuals,
    collings_det,
    euler_cauchy_stokes,
    expansion_form,
    gram_trace_identity_residual,
    invariant_report,
    n4_det_identity_residual,
    newton_residuals,
    normal_invariant_recover,
    pm2_identity_residual,
    power_form_step,
    principal_minor_sums,
    rotation_form,
)
from rotform.invariants import diagonal_rotation_recursion, pm2_sym_skew_residual

from oracles import jordan_shear, random_normal_matrix, rotation_scaling_block


def block_diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    pos = 0
    for b in blocks:
        out[pos:pos + b.shape[0], pos:pos + b.shape[0]] = b
        pos += b.shape[0]
    return out


class TestNewtonResiduals:
    def test_first_identity_exact(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 5):
            A = rng.uniform(-1, 1, (n, n))
            assert newton_residuals(A)[0] == 0.0

    def test_diagonal_matrix(self):
        assert max(newton_residuals(np.diag([1.0, 2.0, 3.0]))) < 1e-12

    def test_random_six_dim(self):
        rng = np.random.default_rng(1)
        A = rng.uniform(-1, 1, (6, 6))
        assert max(newton_residuals(A)) < 1e-9


class TestCayleyHamiltonResidual:
    def test_one_dim_exact(self):
        assert cayley_hamilton_residual(np.array([[3.7]]), np.array([1.0]), np.array([-1.0])) == 0.0

    def test_random_four_dim(self):
        rng = np.random.default_rng(2)
        A = rng.uniform(-1, 1, (4, 4))
        for _ in range(20):
            u = rng.standard_normal(4)
            v = rng.standard_normal(4)
            u /= np.linalg.norm(u)
            v /= np.linalg.norm(v)
            assert cayley_hamilton_residual(A, u, v) < 1e-9

    def test_basis_sum_recovers_trace_identity(self):
        # summing the probe over u = v = b_i results in the order-n trace identity
        rng = np.random.default_rng(3)
        n = 4
        A = rng.uniform(-1, 1, (n, n))
        pm = (1.0,) + principal_minor_sums(A)
        pows = [np.eye(n)]
        for _ in range(n):
            pows.append(pows[-1] @ A)
        total = 0.0
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            total += sum((-1.0) ** k * pm[k] * float((pows[n - k] @ e) @ e) for k in range(n + 1))
        trace_line = sum((-1.0) ** k * pm[k] * np.trace(pows[n - k]) for k in range(n + 1))
        assert total == pytest.approx(trace_line, abs=1e-12)
        assert abs(total) < 1e-9

    def test_rejects_non_unit(self):
        with pytest.raises(InputError):
            cayley_hamilton_residual(np.eye(2), np.array([2.0, 0.0]), np.array([1.0, 0.0]))


class TestChFormResiduals:
    def test_symmetric_eigenvector_collapses(self):
        rng = np.random.default_rng(4)
        M = rng.standard_normal((3, 3))
        Q = M + M.T
        _, P = np.linalg.eigh(Q)
        e_res, r_res = ch_form_residuals(Q, P[:, 1])
        assert e_res < 1e-12
        assert max(r_res.values()) < 1e-12

    def test_random_three_dim_many_probes(self):
        rng = np.random.default_rng(5)
        A = rng.uniform(-1, 1, (3, 3))
        for _ in range(100):
            u = rng.standard_normal(3)
            u /= np.linalg.norm(u)
            e_res, r_res = ch_form_residuals(A, u)
            assert e_res < 1e-9
            assert max(r_res.values()) < 1e-9

    def test_planar_collapse_to_trace_and_determinant(self):
        # the n = 2 identities: trace is shared with the expansion form, and
        # det(A) = det of the rotation form + quarter square of the trace
        rng = np.random.default_rng(6)
        for _ in range(50):
            A = rng.uniform(-1, 1, (2, 2))
            assert np.trace(A) == pytest.approx(np.trace(expansion_form(A).matrix), abs=1e-13)
            det_rot = np.linalg.det(rotation_form(A, (1, 2)).matrix)
            assert np.linalg.det(A) == pytest.approx(
                det_rot + 0.25 * np.trace(expansion_form(A).matrix) ** 2, abs=1e-12
            )


class TestChTraceResiduals:
    def test_planar_lines_explicitly(self):
        rng = np.random.default_rng(7)
        A = rng.uniform(-1, 1, (2, 2))
        A2 = A @ A
        e_line = (
            np.trace(expansion_form(A2).matrix)
            - np.trace(A) * np.trace(expansion_form(A).matrix)
            + 2.0 * np.linalg.det(A)
        )
        r_line = (
            np.trace(rotation_form(A2, (1, 2)).matrix)
            - np.trace(A) * np.trace(rotation_form(A, (1, 2)).matrix)
        )
        assert abs(e_line) < 1e-12
        assert abs(r_line) < 1e-12
        e_res, r_res = ch_trace_residuals(A)
        assert e_res < 1e-12 and max(r_res.values()) < 1e-12

    def test_random_five_dim(self):
        rng = np.random.default_rng(8)
        A = rng.uniform(-1, 1, (5, 5))
        e_res, r_res = ch_trace_residuals(A)
        assert e_res < 1e-9
        assert max(r_res.values()) < 1e-9


class TestPm2Identities:
    def test_hand_arithmetic(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        # -2 = -2.25 + (1/4) * 1^2
        assert principal_minor_sums(A)[1] == pytest.approx(-2.0)
        assert principal_minor_sums(expansion_form(A).matrix)[1] == pytest.approx(-2.25)
        assert np.trace(rotation_form(A, (1, 2)).matrix) == pytest.approx(1.0)
        assert pm2_identity_residual(A) < 1e-15

    def test_symmetric_collapse(self):
        rng = np.random.default_rng(9)
        M = rng.standard_normal((4, 4))
        assert pm2_identity_residual(M + M.T) < 1e-13

    def test_random_six_dim(self):
        rng = np.random.default_rng(10)
        A = rng.uniform(-1, 1, (6, 6))
        assert pm2_identity_residual(A) < 1e-9
        assert pm2_sym_skew_residual(A) < 1e-9


class TestGramTraceIdentity:
    def test_identity_matrix(self):
        for n in (1, 2, 5):
            assert gram_trace_identity_residual(np.eye(n)) < 1e-14

    def test_hand_arithmetic(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        # 2 * 30 = 2 * 17.5 + 25
        assert 2.0 * np.sum(A * A) == pytest.approx(60.0)
        M = rotation_form(A, (1, 2)).matrix
        assert np.trace(M @ M) == pytest.approx(17.5)
        assert gram_trace_identity_residual(A) < 1e-15

    def test_random_four_dim_both_forms(self):
        rng = np.random.default_rng(11)
        A = rng.uniform(-1, 1, (4, 4))
        assert gram_trace_identity_residual(A) < 1e-9


class TestEulerCauchyStokes:
    def test_identity_matrix(self):
        theta, shear, twist = euler_cauchy_stokes(np.eye(3))
        assert theta == 3.0
        assert not shear.any() and not twist.any()

    def test_skew_input(self):
        K = np.array([[0.0, 2.0], [-2.0, 0.0]])
        theta, shear, twist = euler_cauchy_stokes(K)
        assert theta == 0.0
        assert not shear.any()
        np.testing.assert_array_equal(twist, K)

    def test_reconstruction_and_structure(self):
        rng = np.random.default_rng(12)
        for n in (2, 3, 5):
            A = rng.uniform(-1, 1, (n, n))
            theta, shear, twist = euler_cauchy_stokes(A)
            assert theta == pytest.approx(np.trace(A), abs=1e-13)
            assert abs(np.trace(shear)) < 1e-12
            np.testing.assert_allclose(shear, shear.T, atol=1e-15)
            np.testing.assert_allclose(twist, -twist.T, atol=1e-15)
            rebuilt = (theta / n) * np.eye(n) + shear + twist
            np.testing.assert_allclose(rebuilt, A, atol=1e-15)


class TestCollingsDet:
    def test_two_by_two_closed_form(self):
        D = np.diag([2.0, 5.0])
        B = np.array([[1.0, 3.0], [-4.0, 0.5]])
        expected = 2.0 * 5.0 + np.linalg.det(B) + 2.0 * 0.5 + 5.0 * 1.0
        assert collings_det(D, B) == pytest.approx(expected, abs=1e-12)

    def test_zero_diagonal(self):
        rng = np.random.default_rng(13)
        B = rng.uniform(-1, 1, (4, 4))
        assert collings_det(np.zeros((4, 4)), B) == pytest.approx(np.linalg.det(B), abs=1e-12)

    def test_random_five_dim_against_lu(self):
        rng = np.random.default_rng(14)
        D = np.diag(rng.uniform(-2, 2, 5))
        B = rng.uniform(-1, 1, (5, 5))
        assert abs(collings_det(D, B) - np.linalg.det(D + B)) < 1e-10

    def test_rejects_non_diagonal(self):
        with pytest.raises(InputError):
            collings_det(np.ones((2, 2)), np.eye(2))

    def test_rejects_oversize(self):
        with pytest.raises(InputError):
            collings_det(np.eye(21), np.eye(21))


class TestN4DetAudit:
    def test_symmetric_reduces_to_diagonal_determinant(self):
        rng = np.random.default_rng(15)
        M = rng.standard_normal((4, 4))
        assert n4_det_identity_residual(M + M.T) < 1e-12

    def test_skew_reduces_to_skew_determinant(self):
        rng = np.random.default_rng(16)
        M = rng.standard_normal((4, 4))
        assert n4_det_identity_residual(M - M.T) < 1e-12

    def test_random_audit_values_are_tiny(self):
        # report-only audit; empirically the printed identity is exact
        rng = np.random.default_rng(17)
        worst = max(n4_det_identity_residual(rng.uniform(-1, 1, (4, 4))) for _ in range(100))
        assert np.isfinite(worst)
        assert worst < 1e-10

    def test_rejects_wrong_dimension(self):
        with pytest.raises(InputError):
            n4_det_identity_residual(np.eye(3))


class TestOddTracePowerCancellation:
    def test_trace_even_in_skew_part(self):
        rng = np.random.default_rng(18)
        for n in (2, 3, 5):
            D = np.diag(rng.uniform(-2, 2, n))
            M = rng.standard_normal((n, n))
            S = M - M.T
            plus = np.eye(n)
            minus = np.eye(n)
            for k in range(1, 7):
                plus = plus @ (D + S)
                minus = minus @ (D - S)
                gap = abs(np.trace(plus) - np.trace(minus))
                assert gap < 1e-9 * max(1.0, abs(np.trace(plus)))


class TestNormalInvariantRecover:
    def test_two_rotation_blocks(self):
        A = block_diag(rotation_scaling_block(1.0, 0.5), rotation_scaling_block(-0.5, 1.5))
        pm, rank = normal_invariant_recover(A)
        assert rank == 4
        direct = principal_minor_sums(A)
        np.testing.assert_allclose(pm, direct, atol=1e-8)

    def test_three_dim_normal_example(self):
        A = np.array([[1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
        pm, rank = normal_invariant_recover(A)
        assert rank == 3
        np.testing.assert_allclose(pm, (4.0, 6.0, 4.0), atol=1e-8)

    def test_random_constructed_normals(self):
        rng = np.random.default_rng(19)
        for n in (3, 4):
            for _ in range(10):
                A = random_normal_matrix(rng, n)
                pm, rank = normal_invariant_recover(A)
                assert rank == n
                np.testing.assert_allclose(pm, principal_minor_sums(A), atol=1e-7)

    def test_rejects_symmetric(self):
        rng = np.random.default_rng(20)
        M = rng.standard_normal((3, 3))
        with pytest.raises(InputError, match="symmetric"):
            normal_invariant_recover(M + M.T)

    def test_rejects_non_normal(self):
        with pytest.raises(InputError, match="not normal"):
            normal_invariant_recover(jordan_shear(3.0, 1.0))


class TestPowerFormStep:
    def test_planar_hand_case(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        lhs_e, rhs_e, lhs_r, rhs_r = power_form_step(A, 1, np.array([1.0, 0.0]))
        assert lhs_e == pytest.approx(7.0, abs=1e-12)
        assert rhs_e == pytest.approx(7.0, abs=1e-12)
        assert lhs_r[(1, 2)] == pytest.approx(rhs_r[(1, 2)], abs=1e-12)

    def test_symmetric_eigenvector_gives_powers(self):
        rng = np.random.default_rng(21)
        M = rng.standard_normal((3, 3))
        Q = M + M.T
        w, P = np.linalg.eigh(Q)
        u = P[:, 2]
        for m in (1, 2, 3):
            lhs_e, rhs_e, _, _ = power_form_step(Q, m, u)
            assert lhs_e == pytest.approx(w[2] ** (m + 1), rel=1e-10)
            assert rhs_e == pytest.approx(w[2] ** (m + 1), rel=1e-10)

    def test_random_recurrence_residuals(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            A = rng.uniform(-1, 1, (n, n))
            u = rng.standard_normal(n)
            u /= np.linalg.norm(u)
            for m in (1, 2, 3):
                lhs_e, rhs_e, lhs_r, rhs_r = power_form_step(A, m, u)
                assert abs(lhs_e - rhs_e) < 1e-9 * max(1.0, abs(lhs_e))
                for pair in lhs_r:
                    assert abs(lhs_r[pair] - rhs_r[pair]) < 1e-9 * max(1.0, abs(lhs_r[pair]))

    def test_diagonal_recursion_term_by_term(self):
        rng = np.random.default_rng(23)
        A = rng.uniform(-1, 1, (4, 4))
        for m in (1, 2, 3):
            for p in range(1, 4):
                for q in range(p + 1, 5):
                    lhs, rhs = diagonal_rotation_recursion(A, m, (p, q))
                    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))

    def test_rejects_non_unit(self):
        with pytest.raises(InputError):
            power_form_step(np.eye(2), 1, np.array([2.0, 0.0]))


class TestResidualSweepWideDimensions:
    def test_all_residual_operations_up_to_eight(self):
        rng = np.random.default_rng(26)
        for trial in range(100):
            n = 2 + trial % 7
            A = rng.uniform(-1.0, 1.0, (n, n))
            report = invariant_report(A, seed=trial)
            for key, value in report.residuals.items():
                assert value < 1e-9, (n, key, value)


class TestInvariantReport:
    def test_report_is_complete_and_small(self):
        rng = np.random.default_rng(24)
        A = rng.uniform(-1, 1, (4, 4))
        report = invariant_report(A, seed=3)
        assert len(report.pms) == 4
        assert "n4_det" in report.residuals
        for key, value in report.residuals.items():
            assert value < 1e-9, (key, value)

    def test_no_n4_key_for_other_dimensions(self):
        rng = np.random.default_rng(25)
        report = invariant_report(rng.uniform(-1, 1, (3, 3)), seed=0)
        assert "n4_det" not in report.residuals
