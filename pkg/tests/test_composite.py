import numpy as np
import pytest
from hypothesis import given, strategies as st

from cofermion import composite as cp
from cofermion import solutions as sol
from cofermion.deformation import QuasibosonDeformation, chi_from_chi2, linear_chi, quasiboson_phi
from cofermion.fock import FockState, ModeSpace, anticommutator

SPACE = ModeSpace(2, 2, 3)


def e11():
    m = np.zeros((2, 2))
    m[0, 0] = 1.0
    return m


class TestWaveTypes:
    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            cp.WaveMatrix(np.zeros((2, 2)))

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            cp.WaveMatrix(np.eye(2))

    def test_non_orthogonal_family_rejected(self):
        with pytest.raises(ValueError):
            cp.WaveFamily.from_arrays([e11(), e11()])

    def test_gram_identity(self, rng):
        fam = sol.random_family(2, 2, 3, rng)
        assert np.abs(fam.gram() - np.eye(2)).max() < 1e-12

    def test_csv_roundtrip(self, tmp_path, rng):
        fam = sol.random_family(2, 2, 3, rng)
        cp.write_family_csv(fam, tmp_path / "f.csv")
        back = cp.read_family_csv(tmp_path / "f.csv")
        assert (tmp_path / "f.csv").read_text().startswith("alpha,mu,nu,re,im\n")
        for a, b in zip(fam.arrays, back.arrays):
            assert np.allclose(a, b, rtol=0, atol=1e-11)

    def test_csv_bad_header(self, tmp_path):
        (tmp_path / "f.csv").write_text("a,b\n1,1\n")
        with pytest.raises(ValueError):
            cp.read_family_csv(tmp_path / "f.csv")


class TestBuild:
    def test_single_entry(self):
        cons = cp.constituent_ops(SPACE)
        ops = cp.build_cf_ops([e11()], cons)
        target = SPACE.vector(FockState((1, 0), (1, 0)))
        assert np.allclose(ops.creators[0] @ SPACE.vacuum(), target, atol=0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cp.build_cf_ops([np.eye(3) / np.sqrt(3)], cp.constituent_ops(SPACE))

    @given(st.integers(0, 2**32 - 1))
    def test_one_cf_norm(self, seed):
        fam = sol.random_family(1, 2, 2, np.random.default_rng(seed))
        ops = cp.build_cf_ops(fam, cp.constituent_ops(SPACE))
        assert abs(np.linalg.norm(ops.creators[0] @ SPACE.vacuum()) - 1) < 1e-12

    def test_nilpotent(self, rng):
        fam = sol.random_family(2, 2, 2, rng)
        cons = cp.constituent_ops(SPACE)
        ops = cp.build_cf_ops(fam, cons)
        assert cp.nilpotency_residual(ops, cons, fam.arrays) == 0.0
        for x in ops.creators:
            for y in ops.creators:
                assert np.abs(anticommutator(x, y)).max() < 1e-14

    def test_vacuum_anticommutator(self, rng):
        fam = sol.random_family(2, 2, 2, rng)
        chi = chi_from_chi2(0.4, 5)
        ops = cp.build_cf_ops(fam, cp.constituent_ops(SPACE, chi))
        vac = SPACE.vacuum()
        for a in range(2):
            for b in range(2):
                val = np.vdot(vac, anticommutator(ops.annihilators[a], ops.creators[b]) @ vac)
                assert abs(val - (a == b)) < 1e-12

    def test_number_operator_counts(self):
        fam = sol.two_mode_family(sol.TwoModeParams(0.2))
        ops = cp.build_cf_ops(fam, cp.constituent_ops(SPACE))
        n0 = ops.number_op(0)
        for psi, occ in zip(ops.states.T, ops.occupations):
            assert np.linalg.norm(n0 @ psi - occ[0] * psi) < 1e-12


class TestExpansion:
    def test_linear_chi_random_family(self, rng):
        for _ in range(5):
            fam = sol.random_family(2, 2, 2, rng)
            assert cp.anticommutator_expansion_residual(fam, linear_chi(5), SPACE) < 1e-12

    def test_square_chi_two_mode(self):
        chi = quasiboson_phi(QuasibosonDeformation(1, -1), 5)
        fam = sol.two_mode_family(sol.TwoModeParams(0.3))
        assert cp.anticommutator_expansion_residual(fam, chi, SPACE) < 1e-12

    def test_single_entry(self):
        fam = cp.WaveFamily.from_arrays([e11()])
        assert cp.anticommutator_expansion_residual(fam, None, SPACE) < 1e-14

    @pytest.mark.parametrize("chi2", [0.0, 0.5, 1.0, 2.0, 3.0])
    def test_double_commutator_vacuum(self, chi2, rng):
        fam = sol.random_family(2, 2, 2, rng)
        res = cp.double_commutator_vacuum_residual(fam, chi_from_chi2(chi2, 5), SPACE)
        assert res < 1e-10


class TestCondition12:
    def test_single_mode_vanishes(self, rng):
        fam = sol.random_family(1, 2, 3, rng)
        assert cp.condition12_residual(fam, 0.3) == 0.0

    def test_two_mode_family(self, rng):
        p = sol.TwoModeParams(0.4, 1.0, 2.0, sol.random_unitary(2, rng), sol.random_unitary(2, rng))
        assert cp.condition12_residual(sol.two_mode_family(p), 2.0) < 1e-14

    def test_random_fails(self, rng):
        assert cp.condition12_residual(sol.random_family(2, 2, 2, rng), 2.0) > 1e-3


class TestVerify:
    def test_two_mode_passes(self, rng):
        p = sol.TwoModeParams(0.3, 0.5, 1.1, sol.random_unitary(2, rng), sol.random_unitary(2, rng))
        rep = cp.verify_realization(sol.two_mode_family(p), None, SPACE, ("vacuum", "one"))
        assert rep.ok
        assert set(rep.residuals) == set(cp.CONDITIONS)
        assert rep.residuals["eq9"] == 0.0

    def test_generic_deformed_with_two_cf(self, rng):
        fam = sol.deformed_two_mode_family("generic", 0.5, theta=0.2, V=sol.random_unitary(2, rng))
        rep = cp.verify_realization(fam, chi_from_chi2(0.5, 5), SPACE, ("vacuum", "one", "two"))
        assert rep.ok, rep.residuals

    def test_random_fails(self, rng):
        rep = cp.verify_realization(sol.random_family(2, 2, 2, rng), None, SPACE)
        assert not rep.ok
        assert {"eq7", "eq12"} & set(rep.failed())

    def test_empty_state_set(self):
        with pytest.raises(ValueError):
            cp.verify_realization(sol.two_mode_family(sol.TwoModeParams(0.1)), None, SPACE, ())

    def test_unknown_state_class(self):
        with pytest.raises(ValueError):
            cp.verify_realization(sol.two_mode_family(sol.TwoModeParams(0.1)), None, SPACE, ("three",))

    def test_bad_normalization_is_reported(self):
        from cofermion.deformation import StructureFunction

        chi = StructureFunction(np.array([0, 0.9, 2, 3, 4, 5.0]), strict=False)
        rep = cp.verify_realization(sol.two_mode_family(sol.TwoModeParams(0.1)), chi, SPACE)
        assert "normalization" in rep.failed()

    def test_report_csv(self, tmp_path):
        rep = cp.verify_realization(sol.two_mode_family(sol.TwoModeParams(0.1)), None, SPACE)
        rep.write_csv(tmp_path / "r.csv")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines[0] == "condition,residual,passed"
        assert [ln.split(",")[0] for ln in lines[1:]] == list(cp.CONDITIONS)

    def test_nonzero_nilpotency_fails_even_below_tol(self):
        rep = cp.RealizationReport({"eq9": 1e-300, "eq7": 0.0})
        assert rep.failed() == ["eq9"]
