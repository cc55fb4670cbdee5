"""Schmidt decomposition of a composite wavefunction and its entanglement measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPECTRUM_TOL = 1e-12
# squared Schmidt coefficients below this are treated as exact zeros
NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending non-negative Schmidt coefficients with unit sum of squares."""

    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("Schmidt spectrum must be a non-empty 1-D array")
        if np.any(lam < 0):
            raise ValueError("Schmidt coefficients must be non-negative")
        if np.any(np.diff(lam) > 0):
            raise ValueError("Schmidt coefficients must be in descending order")
        if abs(np.sum(lam**2) - 1.0) > SPECTRUM_TOL:
            raise ValueError(f"sum of squared Schmidt coefficients is {np.sum(lam**2)!r}, not 1")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def probabilities(self) -> np.ndarray:
        return self.lambdas**2

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.probabilities > NOISE_FLOOR))

    def __len__(self):
        return self.lambdas.size


def schmidt(phi) -> SchmidtSpectrum:
    """Singular values of the wavefunction matrix, descending.

    Accepts a bare array or anything with a ``phi`` attribute (WaveMatrix).
    """
    mat = np.asarray(getattr(phi, "phi", phi))
    if mat.ndim != 2:
        raise ValueError(f"wavefunction must be a matrix, got shape {mat.shape}")
    norm2 = float(np.vdot(mat, mat).real)
    if abs(norm2 - 1.0) > SPECTRUM_TOL:
        raise ValueError(f"wavefunction not normalized: Tr(Phi Phi^dag) = {norm2!r}")
    s = np.sort(np.linalg.svd(mat, compute_uv=False))[::-1]
    s[s**2 <= NOISE_FLOOR] = 0.0
    if np.count_nonzero(s) == 1:
        # a normalized product state has lambda_1 = 1; drop the SVD rounding
        s[0] = 1.0
    return SchmidtSpectrum(s)


def shannon(p) -> float:
    """-sum p ln p with 0 ln 0 = 0 and the noise floor applied."""
    p = np.asarray(p, dtype=float)
    p = p[p > NOISE_FLOOR]
    # 0.0 - x avoids a signed zero for pure states
    return float(0.0 - np.sum(p * np.log(p)))


def entropy(s: SchmidtSpectrum) -> float:
    """Entanglement entropy in nats."""
    return shannon(s.probabilities)


def purity(s: SchmidtSpectrum) -> float:
    """sum lambda^4, the inverse Schmidt number."""
    return float(np.sum(s.probabilities**2))


def s1(x):
    """-x ln x, zero at and below the noise floor."""
    x = np.asarray(x, dtype=float)
    keep = x > NOISE_FLOOR
    out = 0.0 - np.where(keep, x * np.log(np.where(keep, x, 1.0)), 0.0)
    return out if out.ndim else float(out)


def s2(x):
    """Two-outcome entropy -sin^2 x ln sin^2 x - cos^2 x ln cos^2 x."""
    return s1(np.sin(x) ** 2) + s1(np.cos(x) ** 2)


def two_mode_entropy_closed(theta):
    """Entropy of either mode of the two-mode cofermion family."""
    return s2(np.pi / 4 + np.asarray(theta, dtype=float))


def two_mode_purity_closed(theta):
    return (3.0 - np.cos(4.0 * np.asarray(theta, dtype=float))) / 4.0
