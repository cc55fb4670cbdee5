import numpy as np
import pytest
from hypothesis import given, strategies as st

from cofermion import composite as cp
from cofermion import solutions as sol
from cofermion.deformation import chi_from_chi2
from cofermion.entanglement import entropy, s1, schmidt
from cofermion.fock import ModeSpace

seeds = st.integers(0, 2**32 - 1)
LN2, LN3 = np.log(2.0), np.log(3.0)


class TestCoboson:
    def test_rank_one(self, rng):
        w = sol.coboson_phi(sol.random_unitary(3, rng), sol.random_unitary(2, rng), 1)
        assert list(schmidt(w).lambdas) == [1.0, 0.0]

    def test_m4_equal_values(self, rng):
        w = sol.coboson_phi(sol.random_unitary(4, rng), sol.random_unitary(5, rng), 4,
                            block=sol.random_unitary(4, rng))
        assert np.allclose(schmidt(w).lambdas[:4], 0.5, atol=1e-14)

    @given(st.integers(1, 4), seeds)
    def test_normalized(self, m, seed):
        rng = np.random.default_rng(seed)
        w = sol.coboson_phi(sol.random_unitary(4, rng), sol.random_unitary(4, rng), m,
                            block_position=4 - m)
        assert abs(np.vdot(w.phi, w.phi) - 1) < 1e-12

    def test_block_out_of_range(self):
        with pytest.raises(ValueError):
            sol.coboson_phi(np.eye(2), np.eye(3), 2, block_position=1)


class TestGeneralFamily:
    def test_elementary(self):
        fam = sol.cf_general_family(np.eye(2), np.eye(2), [[1, 0], [0, 1]])
        assert np.array_equal(fam.arrays[0], np.diag([1.0, 0.0]))
        assert np.array_equal(fam.arrays[1], np.diag([0.0, 1.0]))

    @given(seeds)
    def test_condition13_and_gram(self, seed):
        rng = np.random.default_rng(seed)
        fam = sol.cf_general_family(sol.random_unitary(3, rng), sol.random_unitary(3, rng),
                                    sol.random_orthonormal_rows(2, 3, rng))
        assert cp.condition12_residual(fam, 2.0) < 1e-12
        assert np.abs(fam.gram() - np.eye(2)).max() < 1e-12

    def test_non_orthonormal_rows(self):
        with pytest.raises(ValueError):
            sol.cf_general_family(np.eye(2), np.eye(2), [[1, 0], [1, 0]])


class TestTwoMode:
    def test_theta_zero(self):
        for w in sol.two_mode_family(sol.TwoModeParams(0.0)):
            assert np.allclose(schmidt(w).lambdas, [2**-0.5] * 2, atol=1e-15)

    def test_theta_quarter_pi(self):
        w = sol.two_mode_family(sol.TwoModeParams(np.pi / 4)).matrices[0]
        assert list(schmidt(w).lambdas) == [1.0, 0.0]

    @given(st.floats(-np.pi / 4, np.pi / 4), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), seeds)
    def test_gram_and_equal_entropies(self, theta, psi, phi, seed):
        rng = np.random.default_rng(seed)
        fam = sol.two_mode_family(sol.TwoModeParams(theta, psi, phi, sol.random_unitary(2, rng),
                                                    sol.random_unitary(2, rng)))
        assert np.abs(fam.gram() - np.eye(2)).max() < 1e-12
        e1, e2 = (entropy(schmidt(w)) for w in fam)
        assert abs(e1 - e2) < 1e-12


class TestSU3:
    def test_example(self):
        lam = sol.su3_lambda(1, sol.SU3LambdaParams(0, 0, 0))
        assert np.allclose(np.abs(lam) ** 2, [0, 0.5, 0.5], atol=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            sol.SU3LambdaParams(2.0, 0.1, 0.1)

    def test_rows_orthonormal_and_entropy_bounds(self, rng):
        worst = 0.0
        for _ in range(10_000):
            p = sol.SU3LambdaParams.random(rng)
            l1, l2 = sol.su3_lambda(1, p), sol.su3_lambda(2, p)
            worst = max(worst, abs(np.vdot(l1, l1) - 1), abs(np.vdot(l2, l2) - 1), abs(np.vdot(l1, l2)))
            e1, e2 = (entropy(schmidt(w)) for w in sol.su3_family(p))
            assert -1e-15 <= e1 <= LN3 + 1e-12 and -1e-15 <= e2 <= LN3 + 1e-12
            assert abs(e1 - e2) <= LN2 + 1e-12
        assert worst < 1e-12


class TestShiftAngles:
    def test_phi2_right_angle(self):
        sh = sol.shift_angles(0.7, 0.3, np.pi / 2)
        assert abs(sh.theta3_plus) < 1e-15 and abs(sh.theta3_minus) < 1e-15

    def test_theta1_zero(self):
        sh = sol.shift_angles(0.0, 0.3, 1.0)
        assert sh.theta3_plus == 0.0 and sh.theta3_minus == 0.0

    def test_pole(self):
        sh = sol.shift_angles(np.pi / 2, np.pi / 4, 0.0)
        assert sh.theta3_plus == pytest.approx(np.pi / 4, abs=1e-12)
        assert sh.theta3_minus == pytest.approx(-np.pi / 4, abs=1e-12)

    @given(st.floats(0, np.pi / 2), st.floats(0, np.pi / 2), st.floats(0, 2 * np.pi))
    def test_tangent_relation(self, t1, t2, p2):
        sh = sol.shift_angles(t1, t2, p2)
        s = np.sin(t1)
        with np.errstate(divide="ignore", over="ignore"):
            cot = -1 / np.tan(t2) if t2 else np.inf
        for theta, tan_t in ((sh.theta3_plus, np.tan(t2)), (sh.theta3_minus, cot)):
            assert -np.pi / 4 < theta <= np.pi / 4
            if not np.isfinite(tan_t) or abs(tan_t) > 1e6:
                continue
            num = 2 * s * tan_t * np.cos(p2) * (1 if theta is sh.theta3_plus else -1)
            den = 1 - s**2 * tan_t**2
            # sin(2t) den = cos(2t) num avoids the pole of tan
            assert abs(np.sin(2 * theta) * den - np.cos(2 * theta) * num) < 1e-12 * (1 + abs(num) + abs(den))


class TestClosedForm:
    def test_middle_weight_example(self):
        sh = sol.shift_angles(0.0, 0.4, 0.3)
        out = sol.schmidt_sq_closed_form(1, 0.0, 0.0, sh)
        assert out[1] == pytest.approx(0.5, abs=1e-15)
        # both shifts vanish at theta1 = 0, so the outer weights are undetermined
        assert np.isnan(out[0]) and np.isnan(out[2])

    def test_sums_to_one(self, rng):
        for _ in range(200):
            p = sol.SU3LambdaParams.random(rng)
            sh = sol.shift_angles(p.theta1, p.theta2, p.phi2)
            for a in (1, 2):
                assert abs(sol.schmidt_sq_closed_form(a, p.theta1, p.theta3, sh).sum() - 1) < 1e-12

    def test_matches_direct_parametrization(self, rng):
        """Within 1e-10, except where the shift-angle sum is so small that
        one ulp of input rounding is amplified past it; there the deviation
        must stay inside the conditioning bound."""
        over = []
        for _ in range(1000):
            p = sol.SU3LambdaParams.random(rng)
            sh = sol.shift_angles(p.theta1, p.theta2, p.phi2)
            bound = sol.closed_form_error_bound(sh, floor=1e-10)
            for a in (1, 2):
                direct = np.abs(sol.su3_lambda(a, p)) ** 2
                dev = np.abs(sol.schmidt_sq_closed_form(a, p.theta1, p.theta3, sh) - direct).max()
                assert dev <= bound
                if dev > 1e-10:
                    over.append((dev, sol.shift_condition(sh)))
        if over:
            print(f"{len(over)} modes above 1e-10, all with condition >= {min(c for _, c in over):.2e}")

    def test_branch_invariance(self, rng):
        p = sol.SU3LambdaParams.random(rng)
        sh = sol.shift_angles(p.theta1, p.theta2, p.phi2)
        moved = sol.ShiftAngles(sh.theta3_minus + np.pi / 2, sh.theta3_plus - np.pi / 2)
        for a in (1, 2):
            assert np.allclose(sol.schmidt_sq_closed_form(a, p.theta1, p.theta3, sh),
                               sol.schmidt_sq_closed_form(a, p.theta1, p.theta3, moved), atol=1e-12)

    def test_naive_variant_disagrees(self, rng):
        p = sol.SU3LambdaParams(0.9, 0.5, 0.2, 0.0, 0.7, 0.0)
        sh = sol.shift_angles(p.theta1, p.theta2, p.phi2)
        direct = np.abs(sol.su3_lambda(1, p)) ** 2
        assert np.abs(sol.schmidt_sq_naive_variant(1, p.theta1, p.theta3, sh) - direct).max() > 1e-3


class TestC3:
    @given(st.floats(-np.pi, np.pi), st.sampled_from([1, 2]))
    def test_weights_sum_and_period(self, t3, a):
        x = t3 + sol.alpha_tilde(a)
        assert abs(sum((2 / 3) * np.cos(x + np.pi * l / 3) ** 2 for l in (-1, 0, 1)) - 1) < 1e-12
        assert abs(sol.c3_entropy(a, t3 + np.pi / 3) - sol.c3_entropy(a, t3)) < 1e-12

    def test_peak_value(self):
        val = sol.c3_entropy(1, -sol.alpha_tilde(1))
        assert val == pytest.approx(s1(2 / 3) + 2 * s1(1 / 6), abs=1e-15)
        assert val == pytest.approx(0.8676, abs=5e-5)

    def test_point_has_pi_third_shifts(self):
        sh = sol.shift_angles(*sol.c3_point())
        for t in (sh.theta3_plus, sh.theta3_minus):
            assert np.isclose((t - np.pi / 3) % (np.pi / 2), 0, atol=1e-12) or \
                np.isclose((t - np.pi / 3) % (np.pi / 2), np.pi / 2, atol=1e-12)

    def test_matches_direct(self, rng):
        t1, t2, p2 = sol.c3_point()
        for t3 in rng.uniform(-np.pi / 4, np.pi / 4, 50):
            p = sol.SU3LambdaParams(t1, t2, t3, 0.0, p2, 0.0)
            for a in (1, 2):
                direct = entropy(schmidt(np.diag(sol.su3_lambda(a, p))))
                assert abs(direct - sol.c3_entropy(a, t3)) < 1e-10


class TestDeformedTools:
    def test_L_self_vanishes(self, rng):
        phi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.abs(sol.L_operator(phi, phi, rng.normal())).max() < 1e-14

    def test_L_two_mode_nondeformed(self, rng):
        p = sol.TwoModeParams(0.3, 1.0, 0.2, sol.random_unitary(2, rng), sol.random_unitary(2, rng))
        a, b = sol.two_mode_family(p).arrays
        assert np.abs(sol.L_operator(a, b, 0.0)).max() < 1e-14

    @given(st.floats(0, 4), st.floats(-np.pi / 4, np.pi / 4), seeds)
    def test_L_diag_family_any_chi2(self, chi2, theta, seed):
        V = sol.random_unitary(2, np.random.default_rng(seed))
        a, b = (np.diag([np.cos(t + theta), np.sin(t + theta)]) @ V.conj().T
                for t in (-np.pi / 4, np.pi / 4))
        assert np.abs(sol.L_operator(a, b, chi2 - 2)).max() < 1e-12
        assert np.abs(sol.L_operator(b, a, chi2 - 2)).max() < 1e-12

    def test_r_matrix(self, rng):
        assert np.array_equal(sol.r_matrix(1.0, 0.0), np.diag([1.0, -1.0]))
        for _ in range(100):
            u, v = sol.random_su2(rng)
            r = sol.r_matrix(u, v)
            assert np.abs(r @ r - np.eye(2)).max() < 1e-14
            assert np.abs(r - r.conj().T).max() == 0.0

    def test_r_identity(self, rng):
        for _ in range(100):
            u, v = sol.random_su2(rng)
            x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            U = sol.su2(u, v)
            lhs = U.conj().T @ np.diag(np.diag(U @ x @ U.conj().T)) @ U
            r = sol.r_matrix(u, v)
            assert np.abs(lhs - (x + r @ x @ r) / 2).max() < 1e-14

    def test_su2_check(self):
        with pytest.raises(ValueError):
            sol.su2(1.0, 1.0)

    def test_determinant_examples(self):
        assert sol.determinant_criterion(2.0, 0.6, 0.8, 0.3, 0.7) == 0.0
        assert sol.determinant_criterion(0.0, 0.6, 0.8, 0.3, 0.7) == 0.0
        h = 2**-0.5
        assert sol.determinant_criterion(1.0, h, h, 1.0, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_condition_map_is_rotated_L(self, rng):
        for _ in range(20):
            u, v = sol.random_su2(rng)
            U, V = sol.su2(u, v), sol.random_unitary(2, rng)
            l1 = rng.uniform()
            l2 = np.sqrt(1 - l1**2)
            chi2 = rng.uniform(-1, 4)
            p1 = U @ np.diag([l1, l2]) @ V.conj().T
            x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            lhs = 2 * U.conj().T @ sol.L_operator(p1, U @ x @ V.conj().T, chi2 - 2) @ V
            assert np.abs(lhs - sol.first_condition_map(x, chi2, u, v, l1, l2)).max() < 1e-13

    def test_basis_orthonormal_and_orthogonal_to_d1(self, rng):
        u, v = sol.random_su2(rng)
        l1 = 0.8
        basis = sol.orthogonal_basis(l1, 0.6, u, v)
        g = np.array([[np.vdot(a, b) for b in basis] for a in basis])
        assert np.abs(g - np.eye(3)).max() < 1e-15
        d1 = np.diag([0.8, 0.6])
        assert max(abs(np.vdot(d1, b)) for b in basis) < 1e-15


class TestDeformedFamilies:
    space = ModeSpace(2, 2, 3)

    def test_rank1_spectrum(self, rng):
        for mu0 in (1, 2):
            fam = sol.deformed_two_mode_family("eq33", 1.0, V=sol.random_unitary(2, rng), mu0=mu0)
            for w in fam:
                s = schmidt(w)
                assert list(s.lambdas) == [1.0, 0.0] and entropy(s) == 0.0

    def test_nondeformed_matches_two_mode(self, rng):
        V = sol.random_unitary(2, rng)
        a = sol.deformed_two_mode_family("nondeformed", 2.0, theta=0.3, V=V, psi=0.2, phi=0.4)
        b = sol.two_mode_family(sol.TwoModeParams(0.3, 0.2, 0.4, np.eye(2), V))
        for x, y in zip(a.arrays, b.arrays):
            assert np.array_equal(x, y)

    @pytest.mark.parametrize("tag,chi2", [("eq31", 0.0), ("eq32", 1.0), ("eq33", 1.0),
                                          ("generic", 0.7), ("nondeformed", 2.0)])
    def test_L_residuals_and_realization(self, tag, chi2, rng):
        u, v = sol.random_su2(rng)
        fam = sol.deformed_two_mode_family(tag, chi2, theta=rng.uniform(-0.7, 0.7), u=u, v=v,
                                           V=sol.random_unitary(2, rng), mu0=2)
        a, b = fam.arrays
        assert np.abs(sol.L_operator(a, b, chi2 - 2)).max() < 1e-12
        assert np.abs(sol.L_operator(b, a, chi2 - 2)).max() < 1e-12
        rep = cp.verify_realization(fam, chi_from_chi2(chi2, 5), self.space, ("vacuum", "one", "two"))
        assert rep.ok, rep.residuals

    @pytest.mark.parametrize("tag,chi2", [("eq31", 1.0), ("eq32", 0.0), ("eq33", 2.0),
                                          ("generic", 1.0), ("nondeformed", 0.5)])
    def test_tag_mismatch(self, tag, chi2):
        with pytest.raises(ValueError):
            sol.deformed_two_mode_family(tag, chi2)


class TestSVDBlocks:
    @given(seeds)
    def test_roundtrip(self, seed):
        phi = sol.random_family(1, 3, 4, np.random.default_rng(seed)).arrays[0]
        b = sol.svd_blocks(phi)
        assert np.abs(b.reconstruct() - phi).max() < 1e-12
        assert np.all(np.diff(b.singulars) < 0)
        assert abs(np.sum(np.array(b.multiplicities) * b.singulars**2) - 1) < 1e-12

    def test_degenerate_grouping(self, rng):
        w = sol.coboson_phi(sol.random_unitary(4, rng), sol.random_unitary(4, rng), 3)
        b = sol.svd_blocks(w)
        assert b.multiplicities == (3, 1)
        assert np.allclose(b.singulars, [3**-0.5, 0.0], atol=1e-12)
        assert np.abs(b.reconstruct() - w.phi).max() < 1e-12
