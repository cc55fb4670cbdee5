"""Composite fermions built from a (deformed) boson and a fermion.

Truncated Fock-space operators, wavefunction families that realize
independent ordinary fermions, their Schmidt spectra, and a brute-force
oracle for all of it.
"""

from .composite import (RealizationReport, WaveFamily, WaveMatrix, anticommutator_expansion_residual,
                        build_cf_ops, condition12_residual, constituent_ops,
                        double_commutator_vacuum_residual, read_family_csv, verify_realization,
                        write_family_csv)
from .deformation import (QuasibosonDeformation, StructureFunction, chi_from_chi2, fermionic_phi,
                          finite_difference, linear_chi, quasiboson_phi, read_chi_csv, write_chi_csv)
from .entanglement import SchmidtSpectrum, entropy, purity, s1, s2, schmidt
from .fock import FockState, ModeSpace, build_boson_ops, build_deformed_boson_ops, build_fermion_ops
from .solutions import (DeformedCaseTag, SU3LambdaParams, TwoModeParams, cf_general_family,
                        coboson_phi, deformed_two_mode_family, determinant_criterion, r_matrix,
                        schmidt_sq_closed_form, shift_angles, su3_family, su3_lambda,
                        two_mode_family)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
