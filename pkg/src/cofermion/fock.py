"""Truncated multimode Fock spaces for a (deformed) boson and a fermion species.

Basis ordering is lexicographic over (a_occ, b_occ) with the boson modes
first, which is exactly the ordering produced by ``np.kron`` over the mode
factors a_1, ..., a_{d_a}, b_1, ..., b_{d_b}.  Jordan-Wigner sign strings run
over the fermion modes only (ascending order); a- and b-operators commute.

Creation past ``n_max`` maps to the zero vector.  Bosonic commutators are
therefore exact only on the *safe* subspace where every boson occupation is
at most ``n_max - 1``; see ``ModeSpace.safe_mask``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .deformation import StructureFunction

WEAK_TOL = 1e-10

_ID2 = np.eye(2)
_Z = np.diag([1.0, -1.0])
_FCREATE = np.array([[0.0, 0.0], [1.0, 0.0]])  # |0> -> |1>


@dataclass(frozen=True)
class ModeSpace:
    d_a: int
    d_b: int
    n_max: int = 3

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise ValueError(f"need at least one mode per species, got d_a={self.d_a}, d_b={self.d_b}")
        if self.n_max < 2:
            raise ValueError(f"boson cutoff n_max must be >= 2, got {self.n_max}")

    @property
    def boson_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.boson_levels**self.d_a * 2**self.d_b

    def basis(self) -> list[FockState]:
        """All basis states in matrix-index order."""
        a_rng = [range(self.boson_levels)] * self.d_a
        b_rng = [range(2)] * self.d_b
        return [FockState(occ[: self.d_a], occ[self.d_a:])
                for occ in itertools.product(*a_rng, *b_rng)]

    def index(self, state: FockState) -> int:
        self._check(state)
        idx = 0
        for n in state.a_occ:
            idx = idx * self.boson_levels + n
        for n in state.b_occ:
            idx = idx * 2 + n
        return idx

    def vector(self, state: FockState) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(state)] = 1.0
        return v

    def vacuum(self) -> np.ndarray:
        return self.vector(FockState((0,) * self.d_a, (0,) * self.d_b))

    def boson_occupations(self) -> np.ndarray:
        """(dim, d_a) array of boson occupations of each basis state."""
        grids = np.indices((self.boson_levels,) * self.d_a + (2,) * self.d_b)
        return grids[: self.d_a].reshape(self.d_a, -1).T

    def safe_mask(self) -> np.ndarray:
        """Basis states on which bosonic commutators hold exactly."""
        return np.all(self.boson_occupations() <= self.n_max - 1, axis=1)

    def _check(self, state: FockState) -> None:
        if len(state.a_occ) != self.d_a or len(state.b_occ) != self.d_b:
            raise ValueError(f"state {state} does not match d_a={self.d_a}, d_b={self.d_b}")
        if any(n < 0 or n > self.n_max for n in state.a_occ):
            raise ValueError(f"boson occupation out of 0..{self.n_max} in {state}")
        if any(n not in (0, 1) for n in state.b_occ):
            raise ValueError(f"fermion occupation must be 0 or 1 in {state}")


@dataclass(frozen=True)
class FockState:
    a_occ: tuple[int, ...]
    b_occ: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a_occ", tuple(int(n) for n in self.a_occ))
        object.__setattr__(self, "b_occ", tuple(int(n) for n in self.b_occ))


def _embed(space: ModeSpace, a_factors: dict[int, np.ndarray],
           b_factors: dict[int, np.ndarray]) -> np.ndarray:
    ida = np.eye(space.boson_levels)
    facs = [a_factors.get(mu, ida) for mu in range(space.d_a)]
    facs += [b_factors.get(nu, _ID2) for nu in range(space.d_b)]
    return reduce(np.kron, facs)


def _boson_site_creation(amplitudes: np.ndarray) -> np.ndarray:
    """Single-mode creation matrix with <n+1|a^dag|n> = amplitudes[n]."""
    return np.diag(amplitudes, k=-1)


def _fermion_factors(space: ModeSpace, nu: int, site: np.ndarray) -> dict[int, np.ndarray]:
    facs = {j: _Z for j in range(nu)}
    facs[nu] = site
    return facs


def build_boson_ops(space: ModeSpace) -> list[tuple[np.ndarray, np.ndarray]]:
    """(a_mu^dag, a_mu) for every boson mode, a^dag|n> = sqrt(n+1)|n+1>."""
    site = _boson_site_creation(np.sqrt(np.arange(1, space.boson_levels, dtype=float)))
    ops = []
    for mu in range(space.d_a):
        cr = _embed(space, {mu: site}, {})
        ops.append((cr, cr.T.copy()))
    return ops


def build_deformed_boson_ops(space: ModeSpace,
                             chi: StructureFunction) -> list[tuple[np.ndarray, np.ndarray]]:
    """(a_mu^dag, a_mu) with a^dag a = chi(n); a^dag|n> = sqrt(chi(n+1))|n+1>."""
    if chi.n_table < space.n_max:
        raise ValueError(f"chi tabulated to n={chi.n_table}, need at least n_max={space.n_max}")
    if np.any(chi.values < 0):
        raise ValueError("chi has negative entries: not Fock-representable")
    site = _boson_site_creation(np.sqrt(chi.values[1: space.boson_levels]))
    ops = []
    for mu in range(space.d_a):
        cr = _embed(space, {mu: site}, {})
        ops.append((cr, cr.T.copy()))
    return ops


def build_fermion_ops(space: ModeSpace) -> list[tuple[np.ndarray, np.ndarray]]:
    """(b_nu^dag, b_nu) with Jordan-Wigner strings over lower b-modes."""
    ops = []
    for nu in range(space.d_b):
        cr = _embed(space, {}, _fermion_factors(space, nu, _FCREATE))
        ops.append((cr, cr.T.copy()))
    return ops


def boson_number_ops(space: ModeSpace) -> list[np.ndarray]:
    """Occupation-number operators n_mu^a (diagonal)."""
    occ = space.boson_occupations()
    return [np.diag(occ[:, mu].astype(float)) for mu in range(space.d_a)]


def boson_function_op(space: ModeSpace, mu: int, values: Sequence[float]) -> np.ndarray:
    """Diagonal operator g(n_mu^a) from a table values[n], n = 0..n_max."""
    values = np.asarray(values, dtype=float)
    if values.size < space.boson_levels:
        raise ValueError(f"need g(n) for n = 0..{space.n_max}")
    occ = space.boson_occupations()[:, mu]
    return np.diag(values[occ])


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def anticommutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y + y @ x


def weak_equality(lhs: np.ndarray, rhs: np.ndarray, states: Iterable[np.ndarray]) -> float:
    """max over states of ||(lhs - rhs)|psi>||; compare against a tolerance yourself."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    if lhs.shape != rhs.shape or lhs.ndim != 2 or lhs.shape[0] != lhs.shape[1]:
        raise ValueError(f"operator shapes differ: {lhs.shape} vs {rhs.shape}")
    diff = lhs - rhs
    res = 0.0
    for psi in states:
        psi = np.asarray(psi)
        if psi.shape != (diff.shape[1],):
            raise ValueError(f"state of length {psi.shape} does not fit operator dimension {diff.shape[1]}")
        res = max(res, float(np.linalg.norm(diff @ psi)))
    return res


def weakly_equal(lhs: np.ndarray, rhs: np.ndarray, states: Iterable[np.ndarray],
                 tol: float = WEAK_TOL) -> bool:
    return weak_equality(lhs, rhs, states) <= tol
