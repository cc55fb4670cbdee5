"""Closed-form wavefunction families and the low-mode classification tools.

Families here are *generated*; whether they satisfy the realization
conditions is decided independently by :mod:`cofermion.composite`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from .composite import WaveFamily, WaveMatrix
from .entanglement import s1

ORTHO_TOL = 1e-12
GROUP_RTOL = 1e-9
# alpha-tilde = (pi/2)(alpha - 3/2): -pi/4 for mode 1, +pi/4 for mode 2
ALPHA_C = 1.5


def alpha_tilde(alpha: int) -> float:
    if alpha not in (1, 2):
        raise ValueError(f"two-mode parametrizations have alpha in (1, 2), got {alpha}")
    return (np.pi / 2) * (alpha - ALPHA_C)


# ----------------------------------------------------------------------------
# random helpers (seeded, used by tests, oracle and CLI)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(d, random_state=rng)


def random_su2(rng: np.random.Generator) -> tuple[complex, complex]:
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    return complex(z[0], z[1]), complex(z[2], z[3])


def random_orthonormal_rows(k: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """k orthonormal complex vectors of length d (rows of a Haar unitary)."""
    if k > d:
        raise ValueError(f"cannot fit {k} orthonormal vectors in dimension {d}")
    return random_unitary(d, rng)[:k]


def random_family(m_cf: int, d_a: int, d_b: int, rng: np.random.Generator) -> WaveFamily:
    """Gaussian matrices orthonormalized under Tr(Phi_b Phi_a^dag).

    Not a solution of anything: the negative control.
    """
    g = rng.normal(size=(m_cf, d_a * d_b)) + 1j * rng.normal(size=(m_cf, d_a * d_b))
    q, _ = np.linalg.qr(g.T)
    return WaveFamily.from_arrays(q.T.reshape(m_cf, d_a, d_b))


# ----------------------------------------------------------------------------
# SVD block structure


@dataclass(frozen=True)
class SVDBlocks:
    """Phi = U1 diag{lambda_l E_{m_l}} V1^dag with distinct descending lambda_l."""

    U1: np.ndarray
    V1: np.ndarray
    singulars: np.ndarray
    multiplicities: tuple[int, ...]
    shape: tuple[int, int]

    @property
    def r(self) -> int:
        return len(self.singulars)

    def diagonal(self) -> np.ndarray:
        return np.repeat(self.singulars, self.multiplicities)

    def reconstruct(self) -> np.ndarray:
        d = np.zeros(self.shape, dtype=complex)
        vals = self.diagonal()
        d[np.arange(vals.size), np.arange(vals.size)] = vals
        return self.U1 @ d @ self.V1.conj().T


def svd_blocks(phi, rtol: float = GROUP_RTOL) -> SVDBlocks:
    """Group singular values that agree to ``rtol`` (relative to the largest)."""
    mat = np.asarray(getattr(phi, "phi", phi), dtype=complex)
    u, s, vh = np.linalg.svd(mat)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    vals, mults = [], []
    for x in s:
        if vals and abs(vals[-1] - x) <= rtol * scale:
            mults[-1] += 1
        else:
            vals.append(x)
            mults.append(1)
    # within a degenerate group, use the group mean so reconstruction stays exact-ish
    grouped = []
    start = 0
    for m in mults:
        grouped.append(float(np.mean(s[start:start + m])))
        start += m
    return SVDBlocks(u, vh.conj().T, np.array(grouped), tuple(mults), mat.shape)


# ----------------------------------------------------------------------------
# quasiboson and general cofermion families


def coboson_phi(U1: np.ndarray, U2: np.ndarray, m: int, block_position: int = 0,
                block: np.ndarray | None = None, alpha: int = 1) -> WaveMatrix:
    """U1 diag{0..0, sqrt(1/m) U_alpha(m), 0..0} U2^dag.

    ``block`` is the m x m unitary U_alpha(m) (identity if omitted) placed at
    rows/columns ``block_position .. block_position + m - 1``.
    """
    d_a, d_b = U1.shape[0], U2.shape[0]
    if m < 1 or block_position < 0 or block_position + m > min(d_a, d_b):
        raise ValueError(f"block of size {m} at {block_position} does not fit in {d_a}x{d_b}")
    if block is None:
        block = np.eye(m)
    block = np.asarray(block, dtype=complex)
    if block.shape != (m, m) or not np.allclose(block @ block.conj().T, np.eye(m), atol=1e-12):
        raise ValueError("block must be an m x m unitary")
    mid = np.zeros((d_a, d_b), dtype=complex)
    sl = slice(block_position, block_position + m)
    mid[sl, sl] = np.sqrt(1.0 / m) * block
    return WaveMatrix(U1 @ mid @ U2.conj().T, alpha)


def cf_general_family(U: np.ndarray, V: np.ndarray, lambda_rows) -> WaveFamily:
    """Phi_alpha = U diag(lambda^alpha) V^dag for orthonormal complex rows lambda^alpha."""
    lam = np.atleast_2d(np.asarray(lambda_rows, dtype=complex))
    gram = lam.conj() @ lam.T
    dev = np.max(np.abs(gram - np.eye(lam.shape[0])))
    if dev > ORTHO_TOL:
        raise ValueError(f"lambda rows are not orthonormal (deviation {dev:.3e})")
    d_a, d_b = U.shape[0], V.shape[0]
    k = lam.shape[1]
    if k > min(d_a, d_b):
        raise ValueError(f"{k} Schmidt components do not fit in {d_a}x{d_b}")
    mats = []
    for row in lam:
        d = np.zeros((d_a, d_b), dtype=complex)
        d[np.arange(k), np.arange(k)] = row
        mats.append(U @ d @ V.conj().T)
    return WaveFamily.from_arrays(mats)


# ----------------------------------------------------------------------------
# two constituent modes, undeformed boson


@dataclass(frozen=True)
class TwoModeParams:
    theta: float
    psi: float = 0.0
    phi: float = 0.0
    U: np.ndarray = field(default_factory=lambda: np.eye(2))
    V: np.ndarray = field(default_factory=lambda: np.eye(2))


def two_mode_family(p: TwoModeParams) -> WaveFamily:
    """e^{-i a psi} U diag(cos(a+theta) e^{i phi}, sin(a+theta) e^{-i phi}) V^dag, a = -+pi/4."""
    mats = []
    for alpha in (1, 2):
        a = alpha_tilde(alpha)
        d = np.diag([np.cos(a + p.theta) * np.exp(1j * p.phi),
                     np.sin(a + p.theta) * np.exp(-1j * p.phi)])
        mats.append(np.exp(-1j * a * p.psi) * (p.U @ d @ np.conj(p.V).T))
    return WaveFamily.from_arrays(mats)


# ----------------------------------------------------------------------------
# three constituent modes: SU(3)-based parametrization


@dataclass(frozen=True)
class SU3LambdaParams:
    theta1: float
    theta2: float
    theta3: float
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.check:
            return
        eps = 1e-12
        ok = (-eps <= self.theta1 <= np.pi / 2 + eps and -eps <= self.theta2 <= np.pi / 2 + eps
              and -eps <= self.theta3 + np.pi / 4 <= np.pi / 2 + eps)
        ok = ok and all(-eps <= x <= 2 * np.pi + eps for x in (self.phi1, self.phi2, self.phi3))
        if not ok:
            raise ValueError(f"SU(3) angles outside their domain: {self}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SU3LambdaParams":
        t1, t2 = rng.uniform(0, np.pi / 2, 2)
        t3 = rng.uniform(-np.pi / 4, np.pi / 4)
        p1, p2, p3 = rng.uniform(0, 2 * np.pi, 3)
        return cls(t1, t2, t3, p1, p2, p3)


def su3_lambda(alpha: int, p: SU3LambdaParams) -> np.ndarray:
    """Schmidt-coefficient vector lambda^alpha; rows for alpha = 1, 2 are orthonormal."""
    x = alpha_tilde(alpha) + p.theta3
    s1_, c1_ = np.sin(p.theta1), np.cos(p.theta1)
    s2_, c2_ = np.sin(p.theta2), np.cos(p.theta2)
    e2 = np.exp(1j * p.phi2)
    return np.array([
        np.exp(1j * p.phi1) * (s1_ * c2_ * np.cos(x) - s2_ * np.sin(x) * e2),
        c1_ * np.cos(x),
        np.exp(-1j * p.phi3) * (s1_ * s2_ * np.cos(x) + c2_ * np.sin(x) * e2),
    ])


def su3_family(p: SU3LambdaParams, U: np.ndarray | None = None, V: np.ndarray | None = None,
               psi: tuple[float, float] = (0.0, 0.0)) -> WaveFamily:
    """Phi_alpha = e^{-i psi(alpha)} U diag(lambda^alpha) V^dag, 3x3."""
    U = np.eye(3) if U is None else U
    V = np.eye(3) if V is None else V
    rows = np.array([np.exp(-1j * psi[a - 1]) * su3_lambda(a, p) for a in (1, 2)])
    return cf_general_family(U, V, rows)


@dataclass(frozen=True)
class ShiftAngles:
    theta3_minus: float
    theta3_plus: float


def _principal(num: float, den: float) -> float:
    """theta in (-pi/4, pi/4] with tan 2 theta = num / den.

    Folding by pi/2 is done by flipping the signs of both arguments before
    atan2, not by subtracting pi afterwards; the latter would leave the
    absolute error of a value near pi on a result near 0.
    """
    if den < 0:
        num, den = -num, -den
    two_theta = np.arctan2(num, den)
    if two_theta <= -np.pi / 2:
        two_theta = np.pi / 2
    return 0.5 * two_theta + 0.0


def shift_angles(theta1: float, theta2: float, phi2: float) -> ShiftAngles:
    """Shift angles replacing (theta2, phi2) in the closed-form Schmidt coefficients.

    tan 2 theta3^+ = 2 s tan(t2) cos(phi2) / (1 - s^2 tan^2 t2) and the same with
    tan(t2 + pi/2) = -cot t2 (and opposite overall sign) for theta3^-, where
    s = sin(theta1).  Numerator and denominator are multiplied by cos^2 t2
    (resp. sin^2 t2), which removes the poles without touching the quadrant,
    and the result is taken on the principal branch (-pi/4, pi/4].
    """
    s = np.sin(theta1)
    st, ct = np.sin(theta2), np.cos(theta2)
    num = 2.0 * s * st * ct * np.cos(phi2)
    den_plus = ct**2 - s**2 * st**2
    den_minus = st**2 - s**2 * ct**2
    return ShiftAngles(theta3_minus=_principal(num, den_minus),
                       theta3_plus=_principal(num, den_plus))


def shift_condition(shifts: ShiftAngles) -> float:
    """1/|sin 2(theta3^+ + theta3^-)|, the amplification of input rounding in
    ``schmidt_sq_closed_form``."""
    den = abs(np.sin(2 * (shifts.theta3_plus + shifts.theta3_minus)))
    return np.inf if den == 0 else 1.0 / den


# |closed form - exact| <= CLOSED_FORM_ERROR_FACTOR * eps * shift_condition; the
# shift angles carry ~1 ulp of rounding and only their sum enters the
# denominators, so this loss is a property of the formula, not of its evaluation
CLOSED_FORM_ERROR_FACTOR = 16.0


def closed_form_error_bound(shifts: ShiftAngles, floor: float = 0.0) -> float:
    return max(floor, CLOSED_FORM_ERROR_FACTOR * np.finfo(float).eps * shift_condition(shifts))


def schmidt_sq_closed_form(alpha: int, theta1: float, theta3: float,
                           shifts: ShiftAngles) -> np.ndarray:
    """(|lambda_1|^2, |lambda_2|^2, |lambda_3|^2) from theta1, theta3 and the shift angles.

    |l_{1,3}|^2 = (1 + s^2)/4 +- c^4 sin 2(t+ - t-) / (4 (1 + s^2) sin 2(t+ + t-))
                  - (1/2) c^2 sin 2t+- / sin 2(t+ + t-) * cos 2(theta3 -+ t-+ + a)
    |l_2|^2     = (1 - s^2)/2 + (c^2/2) cos 2(theta3 + a)
    with s = sin theta1, c = cos theta1, a = alpha-tilde.  Independent of which
    branch (mod pi/2) the shift angles are given on.  When sin 2(t+ + t-) = 0
    (e.g. theta1 = 0) the first and third weights are not determined by these
    inputs and come back as NaN.
    """
    a = alpha_tilde(alpha)
    tp, tm = shifts.theta3_plus, shifts.theta3_minus
    ss = np.sin(theta1) ** 2
    cc = np.cos(theta1) ** 2
    sin_sum = np.sin(2 * (tp + tm))
    l2 = 0.5 * (1 - ss) + 0.5 * cc * np.cos(2 * (theta3 + a))
    if sin_sum == 0.0:
        return np.array([np.nan, l2, np.nan])
    const = 0.25 * cc**2 * np.sin(2 * (tp - tm)) / ((1 + ss) * sin_sum)
    l1 = 0.25 * (1 + ss) + const - 0.5 * cc * np.sin(2 * tp) / sin_sum * np.cos(2 * (theta3 - tm + a))
    l3 = 0.25 * (1 + ss) - const - 0.5 * cc * np.sin(2 * tm) / sin_sum * np.cos(2 * (theta3 + tp + a))
    return np.array([l1, l2, l3])


def schmidt_sq_naive_variant(alpha: int, theta1: float, theta3: float,
                          shifts: ShiftAngles) -> np.ndarray:
    """Miswritten variant kept as a regression reference: denominator
    1 + s^2 sin 2(t+ + t-) and a sign-swapped constant term.  Disagrees with the
    direct parametrization by O(1); use ``schmidt_sq_closed_form``."""
    a = alpha_tilde(alpha)
    tp, tm = shifts.theta3_plus, shifts.theta3_minus
    ss = np.sin(theta1) ** 2
    cc = np.cos(theta1) ** 2
    out = []
    for sign, (t_a, t_b) in ((1, (tp, tm)), (-1, (tm, tp))):
        sin_sum = np.sin(2 * (t_a + t_b))
        val = (0.25 * (1 + ss)
               + sign * 0.25 * cc**2 * np.sin(2 * (t_a - t_b)) / (1 + ss * sin_sum)
               - 0.5 * np.sin(2 * t_a) / sin_sum * cc * np.cos(2 * (theta3 - sign * t_b + a)))
        out.append(val)
    l2 = 0.5 * (1 - ss) + 0.5 * cc * np.cos(2 * (theta3 + a))
    return np.array([out[0], l2, out[1]])


def c3_entropy(alpha: int, theta3):
    """C3-symmetric entropy sum_l S1((2/3) cos^2(theta3 + pi l/3 + a)), l = -1, 0, 1."""
    a = alpha_tilde(alpha)
    theta3 = np.asarray(theta3, dtype=float)
    return sum(s1((2.0 / 3.0) * np.cos(theta3 + np.pi * l / 3 + a) ** 2) for l in (-1, 0, 1))


def c3_point(rng: np.random.Generator | None = None) -> tuple[float, float, float]:
    """(theta1, theta2, phi2) with sin^2 theta1 = 1/3 and both shift angles = pi/3 (mod pi/2)."""
    return float(np.arcsin(np.sqrt(1.0 / 3.0))), np.pi / 4, np.pi


# ----------------------------------------------------------------------------
# deformed constituent boson, two modes


def su2(u: complex, v: complex) -> np.ndarray:
    """U(u, v) = [[u, v], [-conj v, conj u]]."""
    _check_uv(u, v)
    return np.array([[u, v], [-np.conj(v), np.conj(u)]], dtype=complex)


def _check_uv(u, v, tol=1e-12):
    if abs(abs(u) ** 2 + abs(v) ** 2 - 1.0) > tol:
        raise ValueError(f"|u|^2 + |v|^2 = {abs(u) ** 2 + abs(v) ** 2!r}, expected 1")


def r_matrix(u: complex, v: complex) -> np.ndarray:
    """Hermitian involution R with U^dag diag{(U X U^dag)^{mu mu}} U = (X + R X R)/2."""
    _check_uv(u, v)
    uu, vv = abs(u) ** 2, abs(v) ** 2
    return np.array([[uu - vv, 2 * np.conj(u) * v],
                     [2 * u * np.conj(v), vv - uu]], dtype=complex)


def L_operator(phi1, phi2, delta_chi2: float) -> np.ndarray:
    """L(Phi1, Phi2) = Phi1 Phi1^dag Phi2 - Phi2 Phi1^dag Phi1
    + dchi2 [diag(Phi1 Phi1^dag) Phi2 - diag(Phi2 Phi1^dag) Phi1]."""
    p1 = np.asarray(getattr(phi1, "phi", phi1), dtype=complex)
    p2 = np.asarray(getattr(phi2, "phi", phi2), dtype=complex)
    if p1.shape != p2.shape:
        raise ValueError(f"shape mismatch {p1.shape} vs {p2.shape}")
    h = p1.conj().T
    out = p1 @ h @ p2 - p2 @ h @ p1
    out += delta_chi2 * (np.diag(p1 @ h)[:, None] * p2 - np.diag(p2 @ h)[:, None] * p1)
    return out


def determinant_criterion(chi2: float, u: complex, v: complex, lam1_sq: float, lam2_sq: float) -> float:
    """-chi2 (chi2 - 2) |u|^2 |v|^2 (lam1^2 - lam2^2)^2."""
    _check_uv(u, v)
    if abs(lam1_sq + lam2_sq - 1.0) > 1e-12:
        raise ValueError("squared Schmidt coefficients must sum to 1")
    return -chi2 * (chi2 - 2.0) * abs(u) ** 2 * abs(v) ** 2 * (lam1_sq - lam2_sq) ** 2


def orthogonal_basis(lam1: float, lam2: float, u: complex, v: complex) -> list[np.ndarray]:
    """Basis of the 2x2 matrices X with Tr(D1 X^dag) = 0, D1 = diag(lam1, lam2).

    Orthonormal under the trace inner product when lam1^2 + lam2^2 = 1.
    """
    k = np.exp(1j * (np.angle(v) - np.angle(u)))
    return [np.array([[lam2, 0], [0, -lam1]], dtype=complex),
            np.array([[0, k * lam1], [np.conj(k) * lam2, 0]], dtype=complex),
            np.array([[0, -k * lam2], [np.conj(k) * lam1, 0]], dtype=complex)]


def first_condition_map(x: np.ndarray, chi2: float, u: complex, v: complex,
                        lam1: float, lam2: float) -> np.ndarray:
    """The linear map Phi2~ -> 2 U^dag L(Phi1, Phi2) V after SVD of Phi1:

    chi2 (D1^2 X - X D1^2) + (chi2 - 2) R (D1^2 R X - X D1 R D1).
    """
    d1 = np.diag([lam1, lam2]).astype(complex)
    r = r_matrix(u, v)
    d2 = d1 @ d1
    return chi2 * (d2 @ x - x @ d2) + (chi2 - 2.0) * r @ (d2 @ r @ x - x @ d1 @ r @ d1)


def determinant_system(chi2: float, u: complex, v: complex, lam1: float, lam2: float) -> np.ndarray:
    """3x3 matrix G[j, k] = Tr(M_j^dag T(M_k)) of the linear condition in the
    orthogonal-complement basis (x1, x2, x3).  det G = 8 * determinant_criterion."""
    basis = orthogonal_basis(lam1, lam2, u, v)
    images = [first_condition_map(m, chi2, u, v, lam1, lam2) for m in basis]
    return np.array([[np.vdot(mj, tk) for tk in images] for mj in basis])


DETERMINANT_FACTOR = 8.0


class DeformedCaseTag(enum.Enum):
    chi2_zero = "eq31"
    chi2_one_diag = "eq32"
    chi2_one_rank1 = "eq33"
    generic = "generic"
    nondeformed = "nondeformed"


def _tag_accepts(tag: DeformedCaseTag, chi2: float, tol: float = 1e-12) -> bool:
    if tag is DeformedCaseTag.chi2_zero:
        return abs(chi2) <= tol
    if tag in (DeformedCaseTag.chi2_one_diag, DeformedCaseTag.chi2_one_rank1):
        return abs(chi2 - 1) <= tol
    if tag is DeformedCaseTag.nondeformed:
        return abs(chi2 - 2) <= tol
    return chi2 >= 0 and min(abs(chi2), abs(chi2 - 1), abs(chi2 - 2)) > tol


def deformed_two_mode_family(tag: DeformedCaseTag, chi2: float, theta: float = 0.0,
                             u: complex = 1.0, v: complex = 0.0,
                             V: np.ndarray | None = None, U: np.ndarray | None = None,
                             psi: float = 0.0, phi: float = 0.0, mu0: int = 1) -> WaveFamily:
    """Two-mode cofermion families for a deformed constituent boson.

    chi2_zero      U(u, (-1)^(alpha-1) v) diag(cos(a+theta), sin(a+theta)) V^dag
    chi2_one_diag  diag(cos(a+theta), sin(a+theta)) V^dag   (also ``generic``)
    chi2_one_rank1 Phi_alpha[mu, nu] = delta(mu, mu0) conj(V[nu, alpha])
    nondeformed    the undeformed two-mode family (uses U, V, psi, phi)
    """
    tag = DeformedCaseTag(tag)
    if not _tag_accepts(tag, chi2):
        raise ValueError(f"family {tag.name} is not defined for chi(2) = {chi2}")
    V = np.eye(2) if V is None else np.asarray(V, dtype=complex)
    if tag is DeformedCaseTag.nondeformed:
        return two_mode_family(TwoModeParams(theta, psi, phi, np.eye(2) if U is None else U, V))
    if tag is DeformedCaseTag.chi2_one_rank1:
        if mu0 not in (1, 2):
            raise ValueError(f"mu0 must be 1 or 2, got {mu0}")
        mats = []
        for alpha in (1, 2):
            m = np.zeros((2, 2), dtype=complex)
            m[mu0 - 1, :] = np.conj(V[:, alpha - 1])
            mats.append(m)
        return WaveFamily.from_arrays(mats)
    mats = []
    for alpha in (1, 2):
        a = alpha_tilde(alpha)
        d = np.diag([np.cos(a + theta), np.sin(a + theta)]).astype(complex)
        if tag is DeformedCaseTag.chi2_zero:
            d = su2(u, (-1) ** (alpha - 1) * v) @ d
        mats.append(d @ V.conj().T)
    return WaveFamily.from_arrays(mats)
