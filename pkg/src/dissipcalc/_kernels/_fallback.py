"""Pure-numpy kernel implementations.

Mirror of the compiled core in ``_core.pyx``; selected at import time by
``dissipcalc._kernels`` when the extension is unavailable (or forced via
``DISSIPCALC_BACKEND=python``).  Both backends implement the same
algorithms with the same thresholds, so results agree to rounding noise.

All inputs are square C-contiguous complex128 arrays; argument validation
lives in the wrapper layer (:mod:`dissipcalc.linalg`).
"""

from __future__ import annotations

import math

import numpy as np

from dissipcalc.errors import (
    ConvergenceError,
    OverflowRangeError,
    SingularMatrixError,
)

# [13/13] diagonal Pade coefficients for the matrix exponential.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

_TINY = np.finfo(np.float64).tiny


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def lu_solve(a: np.ndarray, b: np.ndarray, eps_pivot: float) -> np.ndarray:
    """Solve AX = B by Gaussian elimination with partial (row) pivoting.

    Raises SingularMatrixError when a pivot falls below
    ``eps_pivot * ||A||_F``.
    """
    n = a.shape[0]
    lu = a.copy()
    x = b.astype(np.complex128, copy=True)
    anorm = float(np.linalg.norm(a))
    if anorm == 0.0:
        raise SingularMatrixError("zero matrix is singular")
    threshold = eps_pivot * anorm
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < threshold:
            raise SingularMatrixError(
                f"pivot {abs(lu[p, k]):.3e} below threshold {threshold:.3e} "
                f"at column {k}"
            )
        if p != k:
            lu[[k, p], :] = lu[[p, k], :]
            x[[k, p], :] = x[[p, k], :]
        if k + 1 < n:
            mult = lu[k + 1 :, k] / lu[k, k]
            lu[k + 1 :, k] = mult
            lu[k + 1 :, k + 1 :] -= np.outer(mult, lu[k, k + 1 :])
            x[k + 1 :, :] -= np.outer(mult, x[k, :])
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i, :] -= lu[i, i + 1 :] @ x[i + 1 :, :]
        x[i, :] /= lu[i, i]
    return x


def expm(a: np.ndarray, theta13: float, max_squarings: int) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with the [13/13] Pade form."""
    n = a.shape[0]
    norm1 = float(np.abs(a).sum(axis=0).max())
    s = 0
    if norm1 > theta13:
        s = int(math.ceil(math.log2(norm1 / theta13)))
        if s > max_squarings:
            raise OverflowRangeError(
                f"1-norm {norm1:.3e} exceeds the scaling budget "
                f"({max_squarings} squarings)"
            )
        a = a * 2.0**-s
    b = _PADE13
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = lu_solve(v - u, v + u, 1e-13)
    for _ in range(s):
        r = r @ r
    return r


def power_opnorm(
    a: np.ndarray,
    v0: np.ndarray,
    rayleigh_rtol: float,
    resid_rtol: float,
    max_iter: int,
) -> tuple[float, int, float, bool]:
    """Largest singular value of ``a`` by power iteration on A*A.

    Returns ``(sigma, iterations, relative_residual, converged)``.  The
    Rayleigh quotient of A*A underestimates sigma**2, so the estimate is
    one-sided.  Convergence requires both a stable Rayleigh quotient and a
    small eigen-residual ``||A*A v - rho v||``.
    """
    v = v0.astype(np.complex128, copy=True)
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:
        raise ValueError("zero start vector")
    v /= vnorm
    ah = a.conj().T
    rho_old = -1.0
    rho = 0.0
    rel_resid = 0.0
    for it in range(1, max_iter + 1):
        w = a @ v
        mv = ah @ w
        rho = float(np.linalg.norm(w)) ** 2
        if rho <= _TINY:
            return 0.0, it, 0.0, True
        rel_resid = float(np.linalg.norm(mv - rho * v)) / rho
        if abs(rho - rho_old) <= rayleigh_rtol * rho and rel_resid <= resid_rtol:
            return math.sqrt(rho), it, rel_resid, True
        rho_old = rho
        v = mv / float(np.linalg.norm(mv))
    return math.sqrt(rho), max_iter, rel_resid, False


def hermitian_eig(
    h: np.ndarray, off_rtol: float, max_sweeps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns eigenvalues ascending and the unitary of eigenvectors (columns).
    """
    n = h.shape[0]
    a = h.astype(np.complex128, copy=True)
    u = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([a[0, 0].real]), u
    fro = float(np.linalg.norm(h))
    if fro == 0.0:
        return np.zeros(n), u
    threshold = off_rtol * fro
    skip = threshold / (2.0 * n)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                jpp, jpq = c, s
                jqp, jqq = -s * phase.conjugate(), c * phase.conjugate()
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = cp * jpp + cq * jqp
                a[:, q] = cp * jpq + cq * jqq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = jpp.conjugate() * rp + jqp.conjugate() * rq
                a[q, :] = jpq.conjugate() * rp + jqq.conjugate() * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                cp = u[:, p].copy()
                cq = u[:, q].copy()
                u[:, p] = cp * jpp + cq * jqp
                u[:, q] = cp * jpq + cq * jqq
    else:
        raise ConvergenceError(
            f"Jacobi sweep cap {max_sweeps} reached with off-norm {off:.3e}"
        )
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], u[:, order]


def cholesky_psd(h: np.ndarray, shift: float) -> bool:
    """True iff ``h + shift*I`` admits a Cholesky factorization."""
    n = h.shape[0]
    a = h.astype(np.complex128, copy=True)
    a[np.diag_indices(n)] += shift
    low = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = a[j, j].real - float((np.abs(low[j, :j]) ** 2).sum())
        if d <= 0.0:
            return False
        low[j, j] = math.sqrt(d)
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j].conj()) / low[j, j]
    return True
