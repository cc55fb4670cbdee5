"""Composite (boson + fermion) operators and the realization checks.

A composite fermion in mode alpha is created by

    A_alpha^dag = sum_{mu nu} Phi_alpha[mu, nu] a_mu^dag b_nu^dag

and is *realized* by ordinary fermions when the anticommutator, number and
nilpotency relations hold on the vacuum and on few-composite states.  Every
check below is a brute-force matrix computation on a truncated Fock space,
except ``condition12_residual`` which works on the wavefunction matrices
directly.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import sparse

from .deformation import StructureFunction, fermionic_phi, finite_difference_table, linear_chi
from .fock import (WEAK_TOL, ModeSpace, boson_function_op, build_deformed_boson_ops,
                   build_fermion_ops)

ORTHO_TOL = 1e-12
STATE_LEVELS = {"vacuum": 0, "one": 1, "two": 2}

# ----------------------------------------------------------------------------
# wavefunctions


@dataclass(frozen=True)
class WaveMatrix:
    """Internal wavefunction Phi_alpha of one composite mode, shape (d_a, d_b)."""

    phi: np.ndarray
    alpha: int = 1

    def __post_init__(self):
        phi = np.array(self.phi, dtype=complex)
        if phi.ndim != 2:
            raise ValueError(f"wavefunction must be a matrix, got shape {phi.shape}")
        norm2 = float(np.vdot(phi, phi).real)
        if norm2 == 0.0:
            raise ValueError("zero wavefunction cannot be normalized")
        if abs(norm2 - 1.0) > ORTHO_TOL:
            raise ValueError(f"Tr(Phi Phi^dag) = {norm2!r}, expected 1")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phi.shape


@dataclass(frozen=True)
class WaveFamily:
    """Ordered, orthonormal set of wavefunctions (modes alpha = 1..m_CF)."""

    matrices: tuple[WaveMatrix, ...]

    def __post_init__(self):
        mats = tuple(self.matrices)
        if not mats:
            raise ValueError("empty family")
        if len({m.shape for m in mats}) != 1:
            raise ValueError("all wavefunctions in a family must share one shape")
        object.__setattr__(self, "matrices", mats)
        dev = np.max(np.abs(self.gram() - np.eye(len(mats))))
        if dev > ORTHO_TOL:
            raise ValueError(f"family not orthonormal: Gram deviation {dev:.3e}")

    @classmethod
    def from_arrays(cls, arrays: Iterable[np.ndarray]) -> "WaveFamily":
        return cls(tuple(WaveMatrix(a, alpha=i + 1) for i, a in enumerate(arrays)))

    @property
    def arrays(self) -> list[np.ndarray]:
        return [m.phi for m in self.matrices]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrices[0].shape

    def gram(self) -> np.ndarray:
        """G[alpha, beta] = Tr(Phi_beta Phi_alpha^dag)."""
        phis = [m.phi for m in self.matrices]
        return np.array([[np.vdot(pa, pb) for pb in phis] for pa in phis])

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)


def _arrays(family) -> list[np.ndarray]:
    if isinstance(family, WaveFamily):
        return family.arrays
    return [np.asarray(getattr(f, "phi", f), dtype=complex) for f in family]


def write_family_csv(family: WaveFamily, path: str | Path) -> None:
    """Columns alpha,mu,nu,re,im with 1-based indices.

    Entries carry 17 significant digits so a read-back family is bit-identical.
    """
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "mu", "nu", "re", "im"])
        for a, phi in enumerate(family.arrays, start=1):
            for (mu, nu), z in np.ndenumerate(phi):
                w.writerow([a, mu + 1, nu + 1, f"{z.real:.16e}", f"{z.imag:.16e}"])


def read_family_csv(path: str | Path) -> WaveFamily:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["alpha", "mu", "nu", "re", "im"]:
            raise ValueError(f"{path}: expected header alpha,mu,nu,re,im")
        rows = [(int(r["alpha"]), int(r["mu"]), int(r["nu"]), float(r["re"]), float(r["im"]))
                for r in reader]
    if not rows:
        raise ValueError(f"{path}: no entries")
    m = max(r[0] for r in rows)
    da = max(r[1] for r in rows)
    db = max(r[2] for r in rows)
    if min(min(r[0], r[1], r[2]) for r in rows) < 1:
        raise ValueError(f"{path}: indices are 1-based")
    phis = np.zeros((m, da, db), dtype=complex)
    for a, mu, nu, re, im in rows:
        phis[a - 1, mu - 1, nu - 1] = complex(re, im)
    return WaveFamily.from_arrays(phis)


# ----------------------------------------------------------------------------
# operators


@dataclass
class Constituents:
    """Constituent operator sets on one Fock space."""

    space: ModeSpace
    chi: StructureFunction
    bosons: list[tuple[np.ndarray, np.ndarray]]
    fermions: list[tuple[np.ndarray, np.ndarray]]
    # pair operators a_mu^dag b_nu^dag, indexed [mu][nu]
    pairs: list[list[np.ndarray]] = field(repr=False)


_CONS_CACHE: dict = {}


def constituent_ops(space: ModeSpace, chi: StructureFunction | None = None) -> Constituents:
    """Boson (deformed by ``chi``; ordinary if None) and fermion operators.

    Results are cached per (space, chi table); treat them as read-only.
    """
    if chi is None:
        chi = linear_chi(space.n_max + 2)
    key = (space, chi.values.tobytes())
    if key not in _CONS_CACHE:
        if len(_CONS_CACHE) > 32:
            _CONS_CACHE.clear()
        _CONS_CACHE[key] = _constituent_ops(space, chi)
    return _CONS_CACHE[key]


def _constituent_ops(space: ModeSpace, chi: StructureFunction) -> Constituents:
    bos = build_deformed_boson_ops(space, chi)
    fer = build_fermion_ops(space)
    fer_sp = [sparse.csr_matrix(bc) for bc, _ in fer]
    pairs = [[(sparse.csr_matrix(ac) @ bc).toarray() for bc in fer_sp] for ac, _ in bos]
    return Constituents(space, chi, bos, fer, pairs)


class CFMode(NamedTuple):
    annihilation: np.ndarray
    creation: np.ndarray
    number: np.ndarray


@dataclass
class CompositeOps:
    """A_alpha, A_alpha^dag and the composite-generated subspace.

    The number operators are defined through their eigenvectors: every
    product A_{a1}^dag ... A_{ak}^dag |0> (a1 < ... < ak) gets the
    occupation vector of its mode set, and N_alpha acts as 0 on the
    orthogonal complement of their span.
    """

    creators: list[np.ndarray]
    annihilators: list[np.ndarray]
    states: np.ndarray          # (dim, k) normalized CF-product states
    occupations: np.ndarray     # (k, m_CF) 0/1 occupations of those states
    levels: np.ndarray          # (k,) number of composites in each state
    _pinv: np.ndarray = field(repr=False)

    @property
    def m_cf(self) -> int:
        return len(self.creators)

    def number_op(self, alpha: int) -> np.ndarray:
        return self.function_op(alpha, lambda n: n)

    def function_op(self, alpha: int, g) -> np.ndarray:
        """g(N_alpha); on the complement of the composite subspace it is g(0)."""
        vals = np.array([g(int(n)) for n in self.occupations[:, alpha]], dtype=float)
        w = self.states
        proj = w @ self._pinv
        return (w * vals) @ self._pinv + g(0) * (np.eye(w.shape[0]) - proj)

    def function_apply(self, alpha: int, g, psi: np.ndarray) -> np.ndarray:
        vals = np.array([g(int(n)) for n in self.occupations[:, alpha]], dtype=float)
        coef = self._pinv @ psi
        inside = self.states @ coef
        return self.states @ (vals * coef) + g(0) * (psi - inside)

    def state_vectors(self, state_set: Iterable[str]) -> list[np.ndarray]:
        wanted = set()
        for name in state_set:
            if name not in STATE_LEVELS:
                raise ValueError(f"unknown state class {name!r}; choose from {sorted(STATE_LEVELS)}")
            wanted.add(STATE_LEVELS[name])
        return [self.states[:, i] for i in range(self.states.shape[1]) if self.levels[i] in wanted]

    def triples(self) -> list[CFMode]:
        return [CFMode(self.annihilators[a], self.creators[a], self.number_op(a))
                for a in range(self.m_cf)]


def _creation_op(phi: np.ndarray, cons: Constituents) -> np.ndarray:
    d_a, d_b = phi.shape
    out = np.zeros((cons.space.dim, cons.space.dim), dtype=complex)
    for mu in range(d_a):
        for nu in range(d_b):
            if phi[mu, nu] != 0:
                out += phi[mu, nu] * cons.pairs[mu][nu]
    return out


def build_cf_ops(family, cons: Constituents, max_level: int | None = None) -> CompositeOps:
    phis = _arrays(family)
    space = cons.space
    for phi in phis:
        if phi.shape != (space.d_a, space.d_b):
            raise ValueError(f"wavefunction shape {phi.shape} does not match "
                             f"(d_a, d_b) = ({space.d_a}, {space.d_b})")
    creators = [_creation_op(phi, cons) for phi in phis]
    annihilators = [c.conj().T for c in creators]
    m = len(phis)
    if max_level is None:
        max_level = min(m, 3)
    vac = space.vacuum()
    cols, occs, levels = [], [], []
    for k in range(max_level + 1):
        for subset in itertools.combinations(range(m), k):
            psi = vac
            for a in reversed(subset):
                psi = creators[a] @ psi
            nrm = np.linalg.norm(psi)
            if nrm < 1e-12:
                continue
            cols.append(psi / nrm)
            occ = np.zeros(m, dtype=int)
            occ[list(subset)] = 1
            occs.append(occ)
            levels.append(k)
    w = np.array(cols).T
    return CompositeOps(creators, annihilators, w, np.array(occs), np.array(levels),
                        np.linalg.pinv(w))


# ----------------------------------------------------------------------------
# wavefunction-level conditions


def condition12_matrix(phis: Sequence[np.ndarray], alpha: int, beta: int, gamma: int,
                       chi2: float) -> np.ndarray:
    """Matrix M whose vanishing is the one-composite-state consequence of the
    anticommutator relation (reduces to the undeformed cubic relation at chi2 = 2)."""
    pa, pb, pg = phis[alpha], phis[beta], phis[gamma]
    pa_h = pa.conj().T
    ba = pb @ pa_h
    ga = pg @ pa_h
    m = ba @ pg - ga @ pb
    m = m + (chi2 - 2.0) * (np.diag(ba)[:, None] * pg - np.diag(ga)[:, None] * pb)
    return m


def condition12_residual(family, chi2: float) -> float:
    """max over (alpha, beta, gamma) of the Frobenius norm of M."""
    phis = _arrays(family)
    idx = range(len(phis))
    return max(float(np.linalg.norm(condition12_matrix(phis, a, b, g, chi2)))
               for a, b, g in itertools.product(idx, idx, idx))


def _safe_norm(op: np.ndarray, space: ModeSpace) -> float:
    return float(np.linalg.norm(op[:, space.safe_mask()], 2))


def anticommutator_expansion(phis: Sequence[np.ndarray], alpha: int, beta: int,
                             cons: Constituents) -> np.ndarray:
    """Analytic form of {A_alpha, A_beta^dag} in constituent operators.

    sum_mu (Phi_b Phi_a^dag)^{mu mu} D1chi(n_mu)
      + sum_{mu mu'} (Phi_b Phi_a^dag)^{mu' mu} a_mu'^dag a_mu
      - sum_{mu nu nu'} conj(Phi_a^{mu nu}) Phi_b^{mu nu'} D1chi(n_mu) b_nu'^dag b_nu
    """
    space = cons.space
    pa, pb = phis[alpha], phis[beta]
    ba = pb @ pa.conj().T
    d1 = finite_difference_table(cons.chi, 1)
    d1ops = [boson_function_op(space, mu, d1) for mu in range(space.d_a)]
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for mu in range(space.d_a):
        out += ba[mu, mu] * d1ops[mu]
    for mu_p, (acr_p, _) in enumerate(cons.bosons):
        for mu, (_, aan) in enumerate(cons.bosons):
            if ba[mu_p, mu] != 0:
                out += ba[mu_p, mu] * (acr_p @ aan)
    for mu in range(space.d_a):
        coef = np.outer(pa[mu].conj(), pb[mu])  # [nu, nu']
        if not np.any(coef):
            continue
        tail = np.zeros_like(out)
        for nu, (_, ban) in enumerate(cons.fermions):
            for nu_p, (bcr_p, _) in enumerate(cons.fermions):
                if coef[nu, nu_p] != 0:
                    tail += coef[nu, nu_p] * (bcr_p @ ban)
        out -= d1ops[mu] @ tail
    return out


def anticommutator_expansion_residual(family, chi: StructureFunction | None,
                                      space: ModeSpace) -> float:
    """Operator-norm distance between brute-force {A_a, A_b^dag} and its
    analytic expansion, restricted to the safe (untruncated) subspace."""
    cons = constituent_ops(space, chi)
    phis = _arrays(family)
    ops = build_cf_ops(phis, cons, max_level=0)
    res = 0.0
    for a in range(len(phis)):
        for b in range(len(phis)):
            brute = ops.annihilators[a] @ ops.creators[b] + ops.creators[b] @ ops.annihilators[a]
            res = max(res, _safe_norm(brute - anticommutator_expansion(phis, a, b, cons), space))
    return res


def double_commutator_vacuum_residual(family, chi: StructureFunction | None,
                                      space: ModeSpace) -> float:
    """Compare [{A_a, A_b^dag}, A_g^dag]|0> with sum_{mu nu} M^{mu nu} a_mu^dag b_nu^dag |0>."""
    cons = constituent_ops(space, chi)
    phis = _arrays(family)
    ops = build_cf_ops(phis, cons, max_level=0)
    vac = space.vacuum()
    chi2 = cons.chi.chi2
    pair_vac = [[p @ vac for p in row] for row in cons.pairs]
    idx = range(len(phis))
    res = 0.0
    for a, b, g in itertools.product(idx, idx, idx):
        A, Bd, Gd = ops.annihilators[a], ops.creators[b], ops.creators[g]

        def x_apply(v):
            return A @ (Bd @ v) + Bd @ (A @ v)

        brute = x_apply(Gd @ vac) - Gd @ x_apply(vac)
        m = condition12_matrix(phis, a, b, g, chi2)
        pred = sum(m[mu, nu] * pair_vac[mu][nu]
                   for mu in range(space.d_a) for nu in range(space.d_b))
        res = max(res, float(np.linalg.norm(brute - pred)))
    return res


# ----------------------------------------------------------------------------
# realization report

CONDITIONS = ("eq7", "eq8_anti", "eq8_number", "eq9", "eq12", "normalization")


@dataclass
class RealizationReport:
    residuals: dict[str, float]
    tol: float = WEAK_TOL
    passed: dict[str, bool] = field(init=False)

    def __post_init__(self):
        self.passed = {k: (v == 0.0 if k == "eq9" else v <= self.tol)
                       for k, v in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.passed.items() if not v]

    def rows(self) -> list[tuple[str, float, bool]]:
        return [(k, self.residuals[k], self.passed[k]) for k in self.residuals]

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["condition", "residual", "passed"])
            for k, v, ok in self.rows():
                w.writerow([k, f"{v:.11e}", "true" if ok else "false"])


def nilpotency_residual(ops: CompositeOps, cons: Constituents, phis: Sequence[np.ndarray]) -> float:
    """Largest entry of {A_a^dag, A_b^dag} over all a, b.

    Expanded over pair operators P_{mu nu} = a_mu^dag b_nu^dag; each
    {P_{mu nu}, P_{mu' nu'}} is formed from the actual constituent matrices,
    so a wrong sign string or non-commuting boson modes show up here, while
    the floating-point result is exactly zero for a correct construction.
    """
    d_a, d_b = phis[0].shape
    keys = [(mu, nu) for mu in range(d_a) for nu in range(d_b)]
    sp_pairs = {k: sparse.csr_matrix(cons.pairs[k[0]][k[1]]) for k in keys}
    pair_anti = {}
    for i, k1 in enumerate(keys):
        for k2 in keys[i:]:
            p, q = sp_pairs[k1], sp_pairs[k2]
            pair_anti[k1, k2] = p @ q + q @ p
    res = 0.0
    for a in range(len(phis)):
        for b in range(a, len(phis)):
            pa, pb = phis[a], phis[b]
            acc = sparse.csr_matrix((cons.space.dim,) * 2, dtype=complex)
            for i, k1 in enumerate(keys):
                for k2 in keys[i:]:
                    coef = pa[k1] * pb[k2]
                    if k1 != k2:
                        coef = coef + pa[k2] * pb[k1]
                    if coef != 0:
                        acc = acc + coef * pair_anti[k1, k2]
            res = max(res, float(abs(acc).max()) if acc.nnz else 0.0)
    return res


def verify_realization(family, chi: StructureFunction | None, space: ModeSpace,
                       state_set: Iterable[str] = ("vacuum", "one"),
                       tol: float = WEAK_TOL,
                       target: StructureFunction | None = None) -> RealizationReport:
    """Check that the composites act as independent ordinary fermions.

    Weak equalities are evaluated on the normalized composite-product states
    named in ``state_set`` (any of ``vacuum``, ``one``, ``two``); the
    nilpotency condition is checked as a full matrix identity.
    """
    state_set = tuple(state_set)
    if not state_set:
        raise ValueError("state_set must name at least one class of states")
    phis = _arrays(family)
    cons = constituent_ops(space, chi)
    top = max(STATE_LEVELS[s] if s in STATE_LEVELS else -1 for s in state_set)
    ops = build_cf_ops(phis, cons, max_level=min(len(phis), top + 1))
    states = ops.state_vectors(state_set)
    phi_t = target if target is not None else fermionic_phi()
    m = len(phis)

    def target_sum(n):
        return phi_t(n + 1) + phi_t(n)

    eq7 = eq8a = eq8n = 0.0
    for psi in states:
        for a in range(m):
            n_psi = ops.function_apply(a, lambda n: n, psi)
            for b in range(m):
                A, Bd = ops.annihilators[a], ops.creators[b]
                lhs = A @ (Bd @ psi) + Bd @ (A @ psi)
                rhs = ops.function_apply(a, target_sum, psi) if a == b else 0.0
                eq7 = max(eq7, float(np.linalg.norm(lhs - rhs)))
                bd_psi = Bd @ psi
                comm = ops.function_apply(a, lambda n: n, bd_psi) - Bd @ n_psi
                eq8n = max(eq8n, float(np.linalg.norm(comm - (bd_psi if a == b else 0.0))))
                if a != b:
                    Ad = ops.creators[a]
                    eq8a = max(eq8a, float(np.linalg.norm(Ad @ bd_psi + Bd @ (Ad @ psi))))

    fam_gram = np.array([[np.vdot(pa, pb) for pb in phis] for pa in phis])
    vac = space.vacuum()
    one = [c @ vac for c in ops.creators]
    state_gram = np.array([[np.vdot(u, v) for v in one] for u in one])
    eye = np.eye(m)
    norm_res = max(float(np.max(np.abs(fam_gram - eye))), float(np.max(np.abs(state_gram - eye))))

    residuals = {
        "eq7": eq7,
        "eq8_anti": eq8a,
        "eq8_number": eq8n,
        "eq9": nilpotency_residual(ops, cons, phis),
        "eq12": condition12_residual(phis, cons.chi.chi2),
        "normalization": norm_res,
    }
    return RealizationReport(residuals, tol)
