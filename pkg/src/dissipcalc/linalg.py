"""Dense complex linear-algebra kernels.

Matrices are square numpy ``complex128`` arrays.  Functions here validate
their inputs, dispatch the hot kernels to the active backend (compiled or
numpy fallback, see :mod:`dissipcalc._kernels`), and enforce the error
contracts.  No domain knowledge lives in this module.
"""

from __future__ import annotations

import warnings

import numpy as np

from dissipcalc import _kernels
from dissipcalc.errors import (
    DimensionMismatchError,
    SingularMatrixError,
    ValidationError,
)

# Singularity threshold relative to the Frobenius norm of the system matrix.
EPS_PIVOT = 1e-13
# Relative Hermiticity tolerance for eigensolver / PSD-check inputs.
TOL_HERM = 1e-10
# Scaling threshold for the [13/13] Pade approximant.
PADE_THETA13 = 5.371920351148152
# Squaring budget: inputs with 1-norm beyond theta13 * 2**MAX_SQUARINGS are
# rejected (well above the 1e4 range the accuracy contract covers).
MAX_SQUARINGS = 32
# Power iteration controls (deterministic start vector from a fixed seed).
POWER_RAYLEIGH_RTOL = 1e-12
POWER_RESID_RTOL = 1e-10
POWER_MAX_ITER = 10_000
_POWER_SEED = 0x5EED

# Jacobi eigensolver controls.
JACOBI_OFF_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 60


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a square, finite, C-contiguous complex128 array."""
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name}: expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValidationError(f"{name}: dimension must be >= 1")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValidationError(f"{name}: entries must be finite")
    return m


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def identity(dim: int) -> np.ndarray:
    if dim < 1:
        raise ValidationError("dimension must be >= 1")
    return np.eye(dim, dtype=np.complex128)


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a + b


def subtract(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a - b


def multiply(a, b) -> np.ndarray:
    """Matrix product."""
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b


def scalar_multiply(c: complex, a) -> np.ndarray:
    return complex(c) * as_matrix(a)


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.ascontiguousarray(as_matrix(a).conj().T)


def fro_norm(a) -> float:
    """Frobenius (Hilbert-Schmidt) norm."""
    return float(np.linalg.norm(as_matrix(a)))


def lu_solve(a, b) -> np.ndarray:
    """Solve AX = B with partial pivoting.

    Raises SingularMatrixError when a pivot falls below
    ``EPS_PIVOT * ||A||_F``.
    """
    a, b = as_matrix(a, "A"), as_matrix(b, "B")
    _same_dim(a, b)
    return _kernels.lu_solve(a, b, EPS_PIVOT)


def inverse(a) -> np.ndarray:
    return lu_solve(a, identity(as_matrix(a).shape[0]))


def expm(a) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring, [13/13] Pade)."""
    return _kernels.expm(as_matrix(a), PADE_THETA13, MAX_SQUARINGS)


def op_norm(a) -> float:
    """Largest singular value via power iteration on A*A.

    Deterministic: the start vector comes from a fixed-seed generator.  On
    hitting the iteration cap the (one-sided) estimate is returned and the
    eigen-residual is reported in a warning.
    """
    a = as_matrix(a)
    if not a.any():
        return 0.0
    rng = np.random.default_rng(_POWER_SEED)
    n = a.shape[0]
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    sigma, _, resid, converged = _kernels.power_opnorm(
        a, v0, POWER_RAYLEIGH_RTOL, POWER_RESID_RTOL, POWER_MAX_ITER
    )
    if not converged:
        warnings.warn(
            f"power iteration hit its cap ({POWER_MAX_ITER}); "
            f"relative eigen-residual {resid:.2e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return sigma


def _check_hermitian(h: np.ndarray, tol: float, name: str) -> np.ndarray:
    dev = float(np.linalg.norm(h - h.conj().T))
    if dev > tol * float(np.linalg.norm(h)):
        raise ValidationError(
            f"{name}: not Hermitian (relative deviation {dev:.3e})"
        )
    return 0.5 * (h + h.conj().T)


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition H = U diag(w) U* by cyclic Jacobi rotations.

    Returns real eigenvalues in ascending order and the unitary U.
    Rejects inputs whose Hermitian deviation exceeds ``TOL_HERM`` relative.
    """
    h = _check_hermitian(as_matrix(h, "H"), TOL_HERM, "hermitian_eig")
    return _kernels.hermitian_eig(h, JACOBI_OFF_RTOL, JACOBI_MAX_SWEEPS)


def psd_check(h, tol: float) -> bool:
    """True iff ``h + tau*I`` admits a Cholesky factorization.

    ``tau = tol * max(1, ||h||_F)``; Hermiticity is a precondition.
    """
    if tol <= 0:
        raise ValidationError("psd_check: tol must be positive")
    h = _check_hermitian(as_matrix(h, "H"), TOL_HERM, "psd_check")
    shift = tol * max(1.0, float(np.linalg.norm(h)))
    return _kernels.cholesky_psd(h, shift)


def expm_rk4_reference(a, step: float = 1e-4) -> np.ndarray:
    """Independent matrix-exponential oracle: RK4 integration of U' = AU.

    Integrates from U(0) = I to t = 1 with the given step; used only for
    cross-checking ``expm``.  Cost grows as 1/step; keep dimensions small.
    """
    a = as_matrix(a)
    n = a.shape[0]
    nsteps = int(round(1.0 / step))
    h = 1.0 / nsteps
    u = np.eye(n, dtype=np.complex128)
    for _ in range(nsteps):
        k1 = a @ u
        k2 = a @ (u + 0.5 * h * k1)
        k3 = a @ (u + 0.5 * h * k2)
        k4 = a @ (u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


__all__ = [
    "EPS_PIVOT",
    "TOL_HERM",
    "PADE_THETA13",
    "MAX_SQUARINGS",
    "as_matrix",
    "identity",
    "add",
    "subtract",
    "multiply",
    "scalar_multiply",
    "adjoint",
    "fro_norm",
    "lu_solve",
    "inverse",
    "expm",
    "op_norm",
    "hermitian_eig",
    "psd_check",
    "expm_rk4_reference",
    "SingularMatrixError",
]
