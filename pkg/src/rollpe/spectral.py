"""Continuous roll operators from the Fourier logarithm of the shift matrix.

The one-step shift S is diagonal in the DFT basis with eigenvalues
exp(2*pi*1j*k/n), so a matrix logarithm amounts to choosing one imaginary
angle per eigenvalue.  Two branches are provided:

* ``RAW``      -- angles 2*pi*k/n for k = 0..n-1, all non-negative.  This
                  is the textbook diagonalization, but not the principal
                  logarithm: fractional shifts of real vectors become
                  genuinely complex and only their real part is returned.
* ``CENTERED`` -- the same angles wrapped into (-pi, pi].  The spectrum
                  is conjugate-symmetric, the generator is (for odd n)
                  real and skew-symmetric, and fractional shifts act as
                  band-limited interpolation.

Both branches exponentiate back to S exactly at integer shifts.  For even
n the CENTERED branch keeps the Nyquist angle at +pi; returning the real
part makes that coefficient evolve as cos(pi*p/lambda), which preserves
integer shifts but damps Nyquist energy at fractional ones (the only
deviation from strict isometry, and it is exactly sin(pi*p/lambda)^2
times the Nyquist energy of the input).

Dense paths exponentiate through the unitary diagonalization; no
general-purpose (Pade / scaling-squaring) matrix exponential is used
anywhere in the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .roll_core import shift_matrix

__all__ = [
    "SpectralBranch",
    "ShiftGenerator",
    "GeneratorResiduals",
    "dft_matrix",
    "branch_angles",
    "log_shift_generator",
    "roll_continuous",
    "roll_continuous_fft",
    "generator_residuals",
]

# Imaginary leakage above this (relative) level means the conjugate
# symmetry of the centered spectrum has been violated.
_IMAG_LEAK_TOL = 1e-10


class SpectralBranch(Enum):
    """Choice of eigenvalue angles for the shift-matrix logarithm."""

    RAW = "raw"
    CENTERED = "centered"


@dataclass(frozen=True)
class ShiftGenerator:
    """Matrix logarithm of the one-step shift in a given spectral branch.

    ``matrix`` is n-by-n complex, circulant and skew-Hermitian, with
    exp(matrix) equal to the one-step shift.  Immutable after
    construction; build via :func:`log_shift_generator`.
    """

    n: int
    branch: SpectralBranch
    matrix: np.ndarray


@dataclass(frozen=True)
class GeneratorResiduals:
    """Frobenius residuals of the three ShiftGenerator invariants."""

    skew: float
    exp_vs_shift: float
    circulant: float


def _as_vector(x, name: str = "q") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D real vector")
    return arr


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix F[j, k] = exp(-2*pi*1j*j*k/n) / sqrt(n)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def branch_angles(n: int, branch: SpectralBranch) -> np.ndarray:
    """Eigenvalue angles theta_k of the chosen logarithm branch.

    RAW gives 2*pi*k/n; CENTERED wraps each angle into (-pi, pi], which
    for even n leaves the Nyquist angle at +pi.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    k = np.arange(n)
    if branch is SpectralBranch.CENTERED:
        k = np.where(k <= n // 2, k, k - n)
    return 2.0 * np.pi * k / n


def log_shift_generator(n: int, branch: SpectralBranch = SpectralBranch.CENTERED) -> ShiftGenerator:
    """Build the generator A = F^H diag(1j * theta_k) F for the branch."""
    fmat = dft_matrix(n)
    theta = branch_angles(n, branch)
    matrix = fmat.conj().T @ (1j * theta[:, None] * fmat)
    matrix.setflags(write=False)
    return ShiftGenerator(n=n, branch=branch, matrix=matrix)


def _phase_multipliers(n: int, p: float, lam: float, branch: SpectralBranch) -> np.ndarray:
    if not np.isfinite(p):
        raise ValueError("p must be finite")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return np.exp(1j * branch_angles(n, branch) * (p / lam))


def roll_continuous(
    q,
    p: float,
    lam: float = 1.0,
    branch: SpectralBranch = SpectralBranch.CENTERED,
) -> np.ndarray:
    """Roll ``q`` by a real amount ``p`` with period stretched by ``lam``.

    Evolves each Fourier coefficient by exp(1j * theta_k * p / lam) and
    returns the real part.  At integer p/lam this reproduces the discrete
    roll for both branches.  For the CENTERED branch with odd n the
    discarded imaginary part must be negligible; a violation raises
    ``FloatingPointError`` rather than silently corrupting scores.
    """
    q = _as_vector(q)
    n = q.size
    fmat = dft_matrix(n)
    evolved = _phase_multipliers(n, p, lam, branch) * (fmat @ q)
    out = fmat.conj().T @ evolved
    if branch is SpectralBranch.CENTERED and n % 2 == 1:
        leak = float(np.abs(out.imag).max())
        scale = max(1.0, float(np.linalg.norm(q)))
        if leak > _IMAG_LEAK_TOL * scale:
            raise FloatingPointError(
                f"imaginary leakage {leak:.3e} exceeds {_IMAG_LEAK_TOL:.0e} * {scale:.3e}"
            )
    return np.ascontiguousarray(out.real)


def roll_continuous_fft(q, p: float, lam: float = 1.0) -> np.ndarray:
    """O(n log n) fractional roll, CENTERED branch.

    Same result as ``roll_continuous(q, p, lam, CENTERED)`` but computed
    with an FFT instead of dense DFT matrices.
    """
    q = _as_vector(q)
    n = q.size
    mult = _phase_multipliers(n, p, lam, SpectralBranch.CENTERED)
    return np.fft.ifft(np.fft.fft(q) * mult).real


def generator_residuals(gen: ShiftGenerator) -> GeneratorResiduals:
    """Measure how well a generator satisfies its defining invariants.

    skew:          || A + A^H ||_F
    exp_vs_shift:  || exp(A) - S ||_F, with exp taken through the Fourier
                   spectrum of the stored matrix (eigenvalues recovered
                   from its first column, valid because A is circulant)
    circulant:     || A - circulant reconstruction from row 0 ||_F
    """
    a = gen.matrix
    n = gen.n
    skew = float(np.linalg.norm(a + a.conj().T))

    fmat = dft_matrix(n)
    eigs = np.sqrt(n) * (fmat @ a[:, 0])
    exp_a = fmat.conj().T @ (np.exp(eigs)[:, None] * fmat)
    exp_vs_shift = float(np.linalg.norm(exp_a - shift_matrix(n, 1)))

    rebuilt = np.stack([np.roll(a[0], j) for j in range(n)])
    circulant = float(np.linalg.norm(a - rebuilt))
    return GeneratorResiduals(skew=skew, exp_vs_shift=exp_vs_shift, circulant=circulant)
