import numpy as np
import pytest

from cofermion import oracle
from cofermion import solutions as sol
from cofermion.deformation import StructureFunction, chi_from_chi2


@pytest.fixture(scope="module")
def small_run():
    return oracle.run_oracle(seed=3, trials=2)


def test_all_checks_pass(small_run):
    failed = [r.name for r in small_run if not r.passed]
    assert not failed


def test_names_unique_and_cover_suite(small_run):
    names = [r.name for r in small_run]
    assert len(names) == len(set(names))
    for expected in ("fock_boson_algebra", "vacuum_double_commutator", "closed_form_spectra",
                     "determinant_system", "negative_control", "nilpotency_exact"):
        assert expected in names


def test_deterministic(small_run):
    again = oracle.run_oracle(seed=3, trials=2)
    assert [(r.name, r.residual) for r in again] == [(r.name, r.residual) for r in small_run]


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        oracle.run_oracle(trials=0)


def test_corrupted_normalization_is_named():
    bad = StructureFunction(np.array([0.0, 0.9, 2.0, 3.0, 4.0, 5.0]), strict=False)
    failed = {r.name for r in oracle.run_oracle(seed=0, trials=1, chi=bad) if not r.passed}
    assert "normalization" in failed


def test_extra_deformed_chi_still_passes():
    res = oracle.run_oracle(seed=1, trials=1, chi=chi_from_chi2(0.5, 5))
    assert all(r.passed for r in res)


def test_nilpotency_is_exact(small_run):
    r = next(r for r in small_run if r.name == "nilpotency_exact")
    assert r.residual == 0.0


def test_closed_form_allowance_tracks_conditioning():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = sol.SU3LambdaParams.random(rng)
        dev, allowed = oracle.closed_form_deviation(p)
        assert allowed >= 1e-8
        assert dev <= allowed


def test_family_draws_are_orthonormal():
    for name, fam, _, space, _ in oracle.family_draws(np.random.default_rng(8)):
        g = np.array([[np.vdot(a, b) for b in fam.arrays] for a in fam.arrays])
        assert np.allclose(g, np.eye(len(fam.arrays)), atol=1e-12), name
        assert fam.shape == (space.d_a, space.d_b)
