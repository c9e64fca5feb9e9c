"""Dissipative matrices: construction, validation, Cayley transform, resolvents.

A matrix L is dissipative when its imaginary part (L - L*)/2i is positive
semidefinite; every such matrix has spectrum in the closed upper half-plane
and ``(L - lambda I)`` is invertible for Im(lambda) < 0.  In finite
dimension every dissipative matrix is maximal with the whole space as its
domain, so no domain bookkeeping is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dissipcalc import linalg
from dissipcalc.errors import (
    EigenvalueOneError,
    InternalConsistencyError,
    SingularMatrixError,
    ValidationError,
)

# PSD tolerance used when validating the imaginary part.
DISSIPATIVITY_TOL = 1e-10
# Slack admitted on ||T|| <= 1 when accepting a contraction.
CONTRACTION_SLACK = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DissipativeMatrix:
    """A validated dissipative matrix with its cached Cartesian parts.

    ``matrix = hermitian_part + 1j * imaginary_part`` with the imaginary
    part PSD within :data:`DISSIPATIVITY_TOL`.  Instances are immutable
    (arrays are marked read-only) and safe to share between threads.
    """

    matrix: np.ndarray
    hermitian_part: np.ndarray
    imaginary_part: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def shifted_inverse(self) -> np.ndarray:
        """(L + iI)^{-1}, the resolvent at -i."""
        return resolvent(self, -1j)


@dataclass(frozen=True)
class PerturbationPair:
    """Two dissipative matrices together with their difference K = L1 - L2."""

    first: DissipativeMatrix
    second: DissipativeMatrix
    difference: np.ndarray

    @property
    def dim(self) -> int:
        return self.first.dim


def hermitian_split(l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cartesian decomposition L = A + iB with A, B Hermitian (exactly)."""
    a = 0.5 * (l + l.conj().T)
    b = (l - l.conj().T) / 2j
    return a, b


def is_dissipative(l, tol: float = DISSIPATIVITY_TOL) -> bool:
    """True iff the imaginary part of ``l`` is PSD within ``tol``."""
    l = linalg.as_matrix(l, "L")
    _, b = hermitian_split(l)
    return linalg.psd_check(b, tol)


def make_dissipative(a, b, tol: float = DISSIPATIVITY_TOL) -> DissipativeMatrix:
    """Build L = A + iB from a Hermitian part and a PSD imaginary part."""
    a = linalg.as_matrix(a, "A")
    b = linalg.as_matrix(b, "B")
    if a.shape != b.shape:
        raise ValidationError(f"part shapes differ: {a.shape} vs {b.shape}")
    dev_a = float(np.linalg.norm(a - a.conj().T))
    if dev_a > linalg.TOL_HERM * max(1.0, float(np.linalg.norm(a))):
        raise ValidationError(f"A is not Hermitian (deviation {dev_a:.3e})")
    if not linalg.psd_check(b, tol):
        raise ValidationError("B is not positive semidefinite within tolerance")
    a = 0.5 * (a + a.conj().T)
    b = 0.5 * (b + b.conj().T)
    return DissipativeMatrix(
        matrix=_freeze(a + 1j * b),
        hermitian_part=_freeze(a),
        imaginary_part=_freeze(b),
    )


def from_matrix(l, tol: float = DISSIPATIVITY_TOL) -> DissipativeMatrix:
    """Validate an arbitrary matrix as dissipative and cache its parts."""
    l = linalg.as_matrix(l, "L")
    a, b = hermitian_split(l)
    if not linalg.psd_check(b, tol):
        raise ValidationError(
            "imaginary part is not positive semidefinite within tolerance"
        )
    return DissipativeMatrix(
        matrix=_freeze(l), hermitian_part=_freeze(a), imaginary_part=_freeze(b)
    )


def random_dissipative(dim: int, seed, scale: float = 1.0) -> DissipativeMatrix:
    """Seeded random dissipative matrix.

    ``A = scale * (G1 + G1*)/2`` and ``B = scale * G2* G2 / dim`` with G1,
    G2 standard complex Gaussian; the Gram construction guarantees B is PSD
    and the 1/dim normalization keeps the spectral scale O(1) across
    dimensions.  ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    if scale <= 0:
        raise ValidationError("scale must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g1 = random_matrix(dim, rng)
    g2 = random_matrix(dim, rng)
    a = scale * 0.5 * (g1 + g1.conj().T)
    b = scale * (g2.conj().T @ g2) / dim
    return make_dissipative(a, b)


def random_matrix(dim: int, seed) -> np.ndarray:
    """Square matrix of i.i.d. standard complex Gaussian entries."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)


def make_pair(first: DissipativeMatrix, second: DissipativeMatrix) -> PerturbationPair:
    if first.dim != second.dim:
        raise ValidationError("pair dimensions differ")
    return PerturbationPair(
        first=first,
        second=second,
        difference=_freeze(first.matrix - second.matrix),
    )


def perturbed_pair(
    base: DissipativeMatrix, perturbation: DissipativeMatrix
) -> PerturbationPair:
    """Pair (L1, L2) with L2 = L1 + perturbation.

    The sum of two dissipative matrices is dissipative, so L2 needs no
    re-validation.
    """
    second = make_dissipative(
        base.hermitian_part + perturbation.hermitian_part,
        base.imaginary_part + perturbation.imaginary_part,
    )
    return make_pair(base, second)


def resolvent(l: DissipativeMatrix, lam: complex) -> np.ndarray:
    """(L - lambda I)^{-1} for Im(lambda) < 0.

    Dissipativity bounds the result: ||(L - lambda I)^{-1}|| <= 1/|Im lambda|.
    """
    lam = complex(lam)
    if lam.imag >= 0:
        raise ValidationError(f"resolvent point must satisfy Im(lambda) < 0, got {lam}")
    shifted = l.matrix - lam * linalg.identity(l.dim)
    try:
        return linalg.lu_solve(shifted, linalg.identity(l.dim))
    except SingularMatrixError as exc:  # impossible for validated input
        raise InternalConsistencyError(
            f"resolvent singular at {lam} for a validated dissipative matrix"
        ) from exc


def cayley(l: DissipativeMatrix) -> np.ndarray:
    """Cayley transform T = (L - iI)(L + iI)^{-1}, a contraction.

    The two factors commute, so T is computed as (L + iI)^{-1}(L - iI).
    """
    ident = linalg.identity(l.dim)
    try:
        return linalg.lu_solve(l.matrix + 1j * ident, l.matrix - 1j * ident)
    except SingularMatrixError as exc:
        raise InternalConsistencyError(
            "L + iI singular for a validated dissipative matrix"
        ) from exc


def inverse_cayley(t) -> DissipativeMatrix:
    """Inverse Cayley transform L = i(I + T)(I - T)^{-1} of a contraction.

    Rejects non-contractions (``op_norm(t) > 1 + CONTRACTION_SLACK``); a
    numerically singular I - T means 1 is an eigenvalue of T and no finite
    inverse transform exists.
    """
    t = linalg.as_matrix(t, "T")
    norm_t = linalg.op_norm(t)
    if norm_t > 1.0 + CONTRACTION_SLACK:
        raise ValidationError(f"not a contraction: ||T|| = {norm_t:.12f}")
    ident = linalg.identity(t.shape[0])
    try:
        l = 1j * linalg.lu_solve(ident - t, ident + t)
    except SingularMatrixError as exc:
        raise EigenvalueOneError("I - T is numerically singular") from exc
    # Round-off in the solve can push the imaginary part marginally below
    # zero; validation keeps the documented tolerance.
    return from_matrix(l, tol=DISSIPATIVITY_TOL)


__all__ = [
    "DISSIPATIVITY_TOL",
    "CONTRACTION_SLACK",
    "DissipativeMatrix",
    "PerturbationPair",
    "hermitian_split",
    "is_dissipative",
    "make_dissipative",
    "from_matrix",
    "random_dissipative",
    "random_matrix",
    "make_pair",
    "perturbed_pair",
    "resolvent",
    "cayley",
    "inverse_cayley",
]
