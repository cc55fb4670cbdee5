"""Structure functions of deformed oscillators and their finite differences.

A structure function chi(n) is stored as a table chi(0..N_table).  The
operator identities used elsewhere only ever need chi up to the Fock cutoff
plus two, so nothing is symbolic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

NORM_TOL = 1e-12


@dataclass(frozen=True)
class StructureFunction:
    """Tabulated deformation structure function chi(0..n_table).

    ``strict=False`` skips the chi(1) = 1 normalization check so that
    deliberately corrupted tables can be loaded and caught downstream by the
    realization checks.  chi(0) = 0 and chi(n) >= 0 are always enforced.
    """

    values: np.ndarray
    label: str = "custom"
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise ValueError("structure function table needs chi(0), chi(1), chi(2) at least")
        if not np.all(np.isfinite(vals)):
            raise ValueError("structure function table contains non-finite values")
        if abs(vals[0]) > NORM_TOL:
            raise ValueError(f"chi(0) must vanish, got {vals[0]!r}")
        if np.any(vals < 0):
            bad = int(np.argmax(vals < 0))
            raise ValueError(
                f"chi({bad}) = {vals[bad]!r} < 0: not representable on a Fock space")
        if self.strict and abs(vals[1] - 1.0) > NORM_TOL:
            raise ValueError(f"chi(1) must equal 1 (one-particle normalization), got {vals[1]!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_table(self) -> int:
        return self.values.size - 1

    @property
    def chi2(self) -> float:
        return float(self.values[2])

    @property
    def delta_chi2(self) -> float:
        """Deviation chi(2) - 2 from the undeformed boson."""
        return self.chi2 - 2.0

    @property
    def is_normalized(self) -> bool:
        return abs(self.values[1] - 1.0) <= NORM_TOL

    def __call__(self, n: int) -> float:
        if n < 0 or n > self.n_table:
            raise IndexError(f"chi({n}) outside table 0..{self.n_table}")
        return float(self.values[n])

    def truncated(self, n_table: int) -> "StructureFunction":
        if n_table > self.n_table:
            raise IndexError(f"table only reaches n={self.n_table}, asked for {n_table}")
        return StructureFunction(self.values[: n_table + 1], self.label, self.strict)


@dataclass(frozen=True)
class QuasibosonDeformation:
    """Discrete deformation of a two-constituent quasiboson, f = 2/m."""

    m: int
    kappa: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if self.kappa not in (1, -1):
            raise ValueError(f"kappa must be +1 or -1, got {self.kappa!r}")

    @property
    def f(self) -> float:
        return 2.0 / self.m


def linear_chi(n_table: int) -> StructureFunction:
    """chi(n) = n, the ordinary boson."""
    return StructureFunction(np.arange(n_table + 1, dtype=float), "linear")


def quasiboson_phi(d: QuasibosonDeformation, n_table: int) -> StructureFunction:
    """phi(n) = (1 + kappa f/2) n - kappa (f/2) n^2 tabulated on 0..n_table.

    For kappa = +1 the function vanishes at n = m + 1 and turns negative
    beyond; asking for a table past that point raises ``ValueError``.
    """
    n = np.arange(n_table + 1)
    # n (m + kappa - kappa n) / m keeps integer arithmetic until the final division
    vals = n * (d.m + d.kappa - d.kappa * n) / d.m
    if np.any(vals < 0):
        raise ValueError(
            f"quasiboson phi with m={d.m}, kappa={d.kappa} is negative beyond n={d.m + 1}; "
            f"requested table up to n={n_table}")
    return StructureFunction(vals, f"quasiboson(m={d.m},kappa={d.kappa:+d})")


def fermionic_phi(n_table: int = 4) -> StructureFunction:
    """phi(1) = 1, phi(n) = 0 otherwise."""
    vals = np.zeros(n_table + 1)
    vals[1] = 1.0
    return StructureFunction(vals, "fermionic")


def chi_from_chi2(chi2: float, n_table: int) -> StructureFunction:
    """Structure function fixed by chi(2) alone.

    chi(0)=0, chi(1)=1, chi(2)=chi2 and the shifted-linear continuation
    chi(n) = max(n + chi2 - 2, 0) for n >= 3.  Only chi(2) enters the
    conditions checked on vacuum, one- and two-composite states; the
    continuation just keeps the table Fock-representable.  chi2 = 2
    reproduces ``linear_chi`` exactly.
    """
    if chi2 < 0:
        raise ValueError(f"chi(2) = {chi2} < 0 is not Fock-representable")
    n = np.arange(n_table + 1, dtype=float)
    vals = np.maximum(n + (chi2 - 2.0), 0.0)
    vals[:2] = (0.0, 1.0)
    if n_table >= 2:
        vals[2] = chi2
    return StructureFunction(vals, f"chi2={chi2:g}")


def finite_difference(chi: StructureFunction, k: int, n: int) -> float:
    """k-th forward difference sum_l (-1)^(k-l) C(k,l) chi(n+l)."""
    if k < 0:
        raise ValueError("difference order must be non-negative")
    if n < 0 or n + k > chi.n_table:
        raise IndexError(f"Delta^{k} chi({n}) needs chi up to {n + k}, table ends at {chi.n_table}")
    return float(sum((-1) ** (k - l) * comb(k, l) * chi.values[n + l] for l in range(k + 1)))


def finite_difference_table(chi: StructureFunction, k: int) -> np.ndarray:
    """Delta^k chi(n) for every n with n + k inside the table."""
    return np.array([finite_difference(chi, k, n) for n in range(chi.n_table - k + 1)])


def read_chi_csv(path: str | Path, strict: bool = True) -> StructureFunction:
    """Load a two-column ``n,chi`` table (header required, n = 0, 1, 2, ... in order)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header != ["n", "chi"]:
            raise ValueError(f"{path}: expected header 'n,chi', got {','.join(header)!r}")
        rows = [(int(r[0]), float(r[1])) for r in reader if r and any(c.strip() for c in r)]
    ns = [r[0] for r in rows]
    if ns != list(range(len(ns))):
        raise ValueError(f"{path}: n column must run 0, 1, 2, ... without gaps")
    return StructureFunction(np.array([r[1] for r in rows]), f"table:{path.name}", strict=strict)


def write_chi_csv(chi: StructureFunction, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "chi"])
        for n, v in enumerate(chi.values):
            w.writerow([n, f"{v:.11e}"])
