"""Family/chi selection, figure data and parameter sweeps.

Everything here is deterministic given the seed carried by the request, so
the CLI and the scripts in ``scripts/`` produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import solutions as sol
from .composite import WaveFamily, read_family_csv, verify_realization
from .deformation import (QuasibosonDeformation, StructureFunction, chi_from_chi2,
                          linear_chi, quasiboson_phi, read_chi_csv)
from .entanglement import entropy, purity, schmidt, two_mode_entropy_closed, \
    two_mode_purity_closed
from .fock import ModeSpace

log = logging.getLogger(__name__)

FAMILIES = ("coboson", "general", "two-mode", "su3", "eq31", "eq32", "eq33", "random")
# largest per-species mode count that keeps dense operators small
MAX_MODES = 3
DEFAULT_CHI = {"eq31": "chi2:0", "eq32": "chi2:1", "eq33": "chi2:1"}
LN3 = float(np.log(3.0))
LOWER_PANEL_TOL = 1e-6


def fmt(x) -> str:
    """CSV cell: floats with 12 significant digits in scientific notation."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.11e}"
    return str(x)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out: str | Path | None) -> None:
    """Write rows to ``out`` or stdout when ``out`` is None."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())


# ----------------------------------------------------------------------------
# structure functions


def parse_chi(spec: str, n_max: int) -> StructureFunction:
    """``linear``, ``quasiboson:m,kappa``, ``table:FILE`` or ``chi2:VALUE``.

    Tables are loaded without the chi(1) = 1 check so that a bad table is
    reported by the normalization condition instead of being rejected.
    """
    kind, _, arg = spec.partition(":")
    n_table = n_max + 2
    if kind == "linear" and not arg:
        return linear_chi(n_table)
    if kind == "chi2":
        return chi_from_chi2(float(arg), n_table)
    if kind == "table":
        chi = read_chi_csv(arg, strict=False)
        if chi.n_table < n_max:
            raise ValueError(f"{arg}: table ends at n={chi.n_table}, need n_max={n_max}")
        return chi
    if kind == "quasiboson":
        m, kappa = (int(x) for x in arg.split(","))
        d = QuasibosonDeformation(m, kappa)
        try:
            return quasiboson_phi(d, n_table)
        except ValueError:
            # kappa=+1 turns negative past n = m + 1; the bare cutoff may still fit
            return quasiboson_phi(d, n_max)
    raise ValueError(f"cannot parse chi spec {spec!r}")


# ----------------------------------------------------------------------------
# family selection


@dataclass(frozen=True)
class FamilyRequest:
    family: str
    theta: float = 0.0
    theta1: float = np.pi / 4
    theta2: float = np.pi / 4
    theta3: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0
    psi: float = 0.0
    phi: float = 0.0
    mu0: int = 1
    u: complex = 1.0
    v: complex = 0.0
    m: int = 1
    dim: int | None = None
    random_uv: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")


def _deformed_tag(family: str, chi2: float) -> sol.DeformedCaseTag:
    if family == "eq31":
        return sol.DeformedCaseTag.chi2_zero
    if family == "eq33":
        return sol.DeformedCaseTag.chi2_one_rank1
    # eq32 is the diagonal shape; it solves the conditions at every chi(2), and
    # at the special values it coincides with the family tagged for that value
    for value, tag in ((0.0, sol.DeformedCaseTag.chi2_zero), (1.0, sol.DeformedCaseTag.chi2_one_diag),
                       (2.0, sol.DeformedCaseTag.nondeformed)):
        if abs(chi2 - value) <= 1e-12:
            return tag
    return sol.DeformedCaseTag.generic


def build_family(req: FamilyRequest, chi: StructureFunction) -> WaveFamily:
    rng = np.random.default_rng(req.seed)
    f = req.family
    if f == "coboson":
        d = req.dim or max(2, req.m)
        _check_dim(d)
        phi = sol.coboson_phi(sol.random_unitary(d, rng), sol.random_unitary(d, rng), req.m,
                              block=sol.random_unitary(req.m, rng))
        return WaveFamily((phi,))
    if f == "general":
        d = req.dim or 3
        _check_dim(d)
        rows = sol.random_orthonormal_rows(2, d, rng)
        return sol.cf_general_family(sol.random_unitary(d, rng), sol.random_unitary(d, rng), rows)
    if f == "random":
        d = req.dim or 2
        _check_dim(d)
        return sol.random_family(2, d, d, rng)
    if f == "two-mode":
        U, V = _uv_pair(req, rng, 2)
        return sol.two_mode_family(sol.TwoModeParams(req.theta, req.psi, req.phi, U, V))
    if f == "su3":
        U, V = _uv_pair(req, rng, 3)
        p = sol.SU3LambdaParams(req.theta1, req.theta2, req.theta3, req.phi1, req.phi2, req.phi3)
        return sol.su3_family(p, U, V)
    u, v = (sol.random_su2(rng) if req.random_uv else (req.u, req.v))
    if f == "eq32":
        u, v = 1.0, 0.0
    V = sol.random_unitary(2, rng) if req.random_uv else None
    return sol.deformed_two_mode_family(_deformed_tag(f, chi.chi2), chi.chi2, theta=req.theta,
                                        u=u, v=v, V=V, mu0=req.mu0)


def _check_dim(d: int) -> None:
    if not 1 <= d <= MAX_MODES:
        raise ValueError(f"mode count {d} outside 1..{MAX_MODES}")


def _uv_pair(req: FamilyRequest, rng, d: int):
    if req.random_uv:
        return sol.random_unitary(d, rng), sol.random_unitary(d, rng)
    return np.eye(d), np.eye(d)


def default_chi_spec(family: str) -> str:
    return DEFAULT_CHI.get(family, "linear")


@dataclass(frozen=True)
class VerifyJob:
    request: FamilyRequest
    chi_spec: str
    n_max: int = 3
    states: tuple[str, ...] = ("vacuum", "one", "two")
    tol: float = 1e-10
    family_file: str | None = None

    def run(self):
        """(family, chi, report)."""
        chi = parse_chi(self.chi_spec, self.n_max)
        fam = read_family_csv(self.family_file) if self.family_file else build_family(self.request, chi)
        d_a, d_b = fam.shape
        _check_dim(max(d_a, d_b))
        space = ModeSpace(d_a, d_b, self.n_max)
        rep = verify_realization(fam, chi, space, self.states, tol=self.tol)
        log.info("family=%s chi=%s residuals=%s", self.request.family, chi.label, rep.residuals)
        return fam, chi, rep


# ----------------------------------------------------------------------------
# figure 1: two-mode entropy and purity


FIGURE1_HEADER = ("theta", "S_ent", "purity", "S_ent_svd", "purity_svd")


def figure1_rows(steps: int = 201) -> list[tuple]:
    if steps < 2:
        raise ValueError("need at least two samples")
    rows = []
    # symmetric sample grid: theta = 0 and the endpoints are hit exactly
    k = np.arange(steps)
    for theta in (np.pi / 4) * (2 * k - (steps - 1)) / (steps - 1):
        spec = schmidt(sol.two_mode_family(sol.TwoModeParams(theta)).matrices[0])
        rows.append((theta, two_mode_entropy_closed(theta), two_mode_purity_closed(theta),
                     entropy(spec), purity(spec)))
    return rows


FIGURE1_PLOT = """\
import csv, sys
import matplotlib.pyplot as plt
rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "figure1.csv")))
t = [float(r["theta"]) for r in rows]
fig, ax = plt.subplots(1, 2, figsize=(8, 3))
ax[0].plot(t, [float(r["S_ent"]) for r in rows]); ax[0].set_xlabel("theta"); ax[0].set_ylabel("S_ent")
ax[1].plot(t, [float(r["purity"]) for r in rows]); ax[1].set_xlabel("theta"); ax[1].set_ylabel("purity")
fig.tight_layout(); fig.savefig("figure1.png", dpi=150)
"""

FIGURE2_PLOT = """\
import csv, sys
import matplotlib.pyplot as plt
rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "figure2.csv")))
fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
for a, panel, key in ((ax[0], "upper", "S1"), (ax[1], "lower", "S2")):
    sel = [r for r in rows if r["panel"] == panel]
    x = [float(r["param1"]) for r in sel]; y = [float(r["param2"]) for r in sel]
    sc = a.tricontour(x, y, [float(r[key]) for r in sel], levels=12)
    a.set_title(f"{panel}: {key}"); fig.colorbar(sc, ax=a)
ax[0].set_xlabel("theta1"); ax[0].set_ylabel("theta3")
ax[1].set_xlabel("theta3"); ax[1].set_ylabel("phi2")
fig.tight_layout(); fig.savefig("figure2.png", dpi=150)
"""


# ----------------------------------------------------------------------------
# figure 2: three-mode equi-entropic curves


FIGURE2_HEADER = ("panel", "param1", "param2", "theta1", "theta2", "theta3", "phi2", "S1", "S2")


def _su3_entropies(p: sol.SU3LambdaParams) -> tuple[float, float]:
    fam = sol.su3_family(p)
    return entropy(schmidt(fam.matrices[0])), entropy(schmidt(fam.matrices[1]))


def upper_panel_point(theta1: float) -> tuple[float, float]:
    """(theta2, phi2) putting both shift angles at pi/3 (mod pi/2); needs sin theta1 >= 1/sqrt 3."""
    s, c = np.sin(theta1), np.cos(theta1)
    cphi = -np.sqrt(3.0) * c**2 / (2.0 * s)
    if cphi < -1 - 1e-12:
        raise ValueError(f"theta1={theta1}: shift angles pi/3 need sin(theta1) >= 1/sqrt(3)")
    return np.pi / 4, float(np.arccos(np.clip(cphi, -1.0, 1.0)))


def figure2_upper(grid: int = 32) -> list[tuple]:
    lo = float(np.arcsin(1.0 / np.sqrt(3.0)))
    rows = []
    for t1 in np.linspace(lo, np.pi / 2, grid):
        t2, p2 = upper_panel_point(t1)
        for t3 in np.linspace(-np.pi / 4, np.pi / 4, grid):
            p = sol.SU3LambdaParams(t1, t2, t3, 0.0, p2, 0.0, check=False)
            rows.append(("upper", t1, t3, t1, t2, t3, p2, *_su3_entropies(p)))
    return rows


def _mode1_first_weight(theta1, theta2, theta3, phi2) -> float:
    p = sol.SU3LambdaParams(theta1, theta2, theta3, 0.0, phi2, 0.0, check=False)
    return float(abs(sol.su3_lambda(1, p)[0]) ** 2)


def lower_panel_points(theta3: float, phi2: float, samples: int = 64) -> list[tuple[float, float]]:
    """All (theta1, theta2) with mode-1 spectrum (1/3, 1/3, 1/3) at the given (theta3, phi2).

    The middle weight fixes cos^2 theta1 = 1/(3 cos^2(theta3 + a1)) in closed
    form; the first weight is then driven to 1/3 by bracketing on a theta2 grid
    followed by Brent refinement.
    """
    x = theta3 + sol.alpha_tilde(1)
    cx2 = np.cos(x) ** 2
    if 3.0 * cx2 < 1.0:
        return []
    theta1 = float(np.arccos(np.sqrt(1.0 / (3.0 * cx2))))

    def f(t2):
        return _mode1_first_weight(theta1, t2, theta3, phi2) - 1.0 / 3.0

    grid = np.linspace(0.0, np.pi / 2, samples)
    vals = [f(t) for t in grid]
    roots = []
    for (a, fa), (b, fb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return [(theta1, t2) for t2 in roots]


def figure2_lower(grid: int = 32) -> list[tuple]:
    hi = np.pi / 4
    lo = hi - float(np.arccos(1.0 / np.sqrt(3.0)))
    rows = []
    for t3 in np.linspace(lo, hi, grid):
        for p2 in np.linspace(0.0, 2 * np.pi, grid):
            for t1, t2 in lower_panel_points(t3, p2):
                p = sol.SU3LambdaParams(t1, t2, t3, 0.0, p2, 0.0, check=False)
                s1_, s2_ = _su3_entropies(p)
                if abs(s1_ - LN3) <= LOWER_PANEL_TOL:
                    rows.append(("lower", t3, p2, t1, t2, t3, p2, s1_, s2_))
    return rows


def figure2_rows(grid: int = 32) -> list[tuple]:
    if grid < 16:
        raise ValueError("figure 2 grids need at least 16 points per axis")
    return figure2_upper(grid) + figure2_lower(grid)


# ----------------------------------------------------------------------------
# sweeps


SWEEPABLE = ("theta", "theta1", "theta2", "theta3", "phi1", "phi2", "phi3", "psi", "phi")


@dataclass(frozen=True)
class SweepSpec:
    parameters: dict[str, tuple[float, float, int]]
    family: str
    chi: str
    out: str | None = None
    n_max: int = 3
    tol: float = 1e-10
    seed: int = 0
    base: FamilyRequest | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.parameters:
            raise ValueError("a sweep needs at least one parameter")
        for name, (start, stop, steps) in self.parameters.items():
            if name not in SWEEPABLE:
                raise ValueError(f"cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")
            if steps < 2 or not start < stop:
                raise ValueError(f"{name}: need steps >= 2 and start < stop")

    def points(self) -> list[dict[str, float]]:
        names = list(self.parameters)
        axes = [np.linspace(*self.parameters[n][:2], self.parameters[n][2]) for n in names]
        return [dict(zip(names, vals)) for vals in itertools.product(*axes)]


def parse_sweep_param(text: str) -> tuple[str, tuple[float, float, int]]:
    """``name=start,stop,steps``."""
    name, _, rng_txt = text.partition("=")
    parts = rng_txt.split(",")
    if len(parts) != 3:
        raise ValueError(f"sweep parameter must be name=start,stop,steps, got {text!r}")
    return name.strip(), (float(parts[0]), float(parts[1]), int(parts[2]))


def run_sweep(spec: SweepSpec) -> tuple[list[str], list[tuple]]:
    from .composite import CONDITIONS

    base = spec.base or FamilyRequest(spec.family, seed=spec.seed)
    names = list(spec.parameters)
    header = names + list(CONDITIONS) + ["passed", "S_ent_1", "S_ent_2"]
    rows = []
    for point in spec.points():
        job = VerifyJob(replace(base, **point), spec.chi, spec.n_max, tol=spec.tol)
        fam, _, rep = job.run()
        ents = [entropy(schmidt(w)) for w in fam.matrices[:2]]
        ents += [float("nan")] * (2 - len(ents))
        rows.append(tuple(point[n] for n in names)
                    + tuple(rep.residuals[c] for c in CONDITIONS) + (rep.ok, *ents))
    return header, rows
