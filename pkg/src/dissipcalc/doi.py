"""Divided-difference factorizations and the double-operator-integral engine.

For a function f in the working class the divided difference factors as a
finite sum of separated terms

    Df(z, w) = sum_n  weight_n * left_n(z) * right_n(w),

exactly for the constant, linear and resolvent parts, and through a
Gauss-Legendre discretization of the Duhamel integral

    (e^{itz} - e^{itw})/(z - w) = i * int_0^t e^{isz} e^{i(t-s)w} ds

for the exponential parts.  Applying each separated term to matrices gives
the double-operator-integral value

    sum_n weight_n * left_n(L1) @ K @ right_n(L2),

which this module uses to check the representation identities for
f(L1) - f(L2) and f(L1)R - Rf(L2), the sandwich identities behind them,
and the operator-Lipschitz / Hilbert-Schmidt estimates they imply.
Diagonal (Schur product) and self-adjoint (spectral) reference evaluations
are provided as independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from dissipcalc import funcalc, linalg
from dissipcalc.dissipative import DissipativeMatrix, PerturbationPair, resolvent
from dissipcalc.errors import ValidationError
from dissipcalc.funcalc import AnalyticFunction

DEFAULT_QUAD_NODES = 32
QUAD_NODES_CAP = 256
# Residual stagnation threshold for the node-doubling utility.
QUAD_STAGNATION_ATOL = 1e-12


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return tuple(nodes.tolist()), tuple(weights.tolist())


@dataclass(frozen=True)
class ScalarFactor:
    """One separated factor: constant 1, a resolvent, or a half-plane exponential.

    kinds: ``const`` -> 1; ``res`` with pole p -> 1/(z - p);
    ``exp`` with time s >= 0 -> exp(i s z).  All are analytic in the open
    upper half-plane, continuous on its closure, and bounded there.
    """

    kind: str
    param: complex = 0j

    def eval_scalar(self, z: complex) -> complex:
        if self.kind == "const":
            return 1.0 + 0j
        if self.kind == "res":
            return 1.0 / (complex(z) - self.param)
        if self.kind == "exp":
            return np.exp(1j * self.param.real * complex(z))
        raise ValidationError(f"unknown factor kind {self.kind!r}")

    def eval_matrix(self, l: DissipativeMatrix) -> np.ndarray:
        if self.kind == "const":
            return linalg.identity(l.dim)
        if self.kind == "res":
            return resolvent(l, self.param)
        if self.kind == "exp":
            return linalg.expm(1j * self.param.real * l.matrix)
        raise ValidationError(f"unknown factor kind {self.kind!r}")


@dataclass(frozen=True)
class HaagerupDecomposition:
    """Finite separated representation of the divided difference of ``source``.

    ``pairs`` holds (weight, left factor, right factor); ``quad_nodes`` is
    the Gauss-Legendre node count used per exponential term.
    """

    pairs: tuple[tuple[complex, ScalarFactor, ScalarFactor], ...]
    source: AnalyticFunction
    quad_nodes: int

    def kernel(self, z: complex, w: complex) -> complex:
        """Pointwise reconstruction sum_n weight * left(z) * right(w)."""
        return sum(
            (wt * lf.eval_scalar(z) * rf.eval_scalar(w) for wt, lf, rf in self.pairs),
            start=0j,
        )

    def factorization_bound(self, z_samples, w_samples) -> float:
        """Sampled Cauchy-Schwarz bound on the separated representation.

        ``sqrt(max_z sum |wt| |left(z)|^2) * sqrt(max_w sum |wt| |right(w)|^2)``
        over the given sample points; dominated by ``ol_bound(source)``.
        """
        left_sup = max(
            sum(abs(wt) * abs(lf.eval_scalar(z)) ** 2 for wt, lf, _ in self.pairs)
            for z in z_samples
        )
        right_sup = max(
            sum(abs(wt) * abs(rf.eval_scalar(w)) ** 2 for wt, _, rf in self.pairs)
            for w in w_samples
        )
        return float(np.sqrt(left_sup) * np.sqrt(right_sup))


def haagerup_decompose(
    f: AnalyticFunction, quad_nodes: int = DEFAULT_QUAD_NODES
) -> HaagerupDecomposition:
    """Separated representation of the divided difference of f.

    Constant terms drop out; the linear term contributes (m, 1, 1); each
    resolvent term a/(z - p) contributes the exact rank-one pair
    (-a, 1/(z-p), 1/(w-p)); each exponential term b e^{itz} contributes
    ``quad_nodes`` Gauss-Legendre samples (i b w_q, e^{i s_q z},
    e^{i (t - s_q) w}) of its Duhamel integral over [0, t].
    """
    if quad_nodes < 1:
        raise ValidationError("quad_nodes must be >= 1")
    pairs: list[tuple[complex, ScalarFactor, ScalarFactor]] = []
    one = ScalarFactor("const")
    if f.linear != 0:
        pairs.append((f.linear, one, one))
    for a, lam in f.resolvent_terms:
        factor = ScalarFactor("res", lam)
        pairs.append((-a, factor, factor))
    nodes, weights = _gauss_legendre(quad_nodes)
    for b, t in f.exponential_terms:
        if t == 0.0:
            continue  # constant in disguise: divided difference vanishes
        half = 0.5 * t
        for x, gw in zip(nodes, weights):
            s = half * (x + 1.0)
            pairs.append(
                (
                    1j * b * half * gw,
                    ScalarFactor("exp", complex(s)),
                    ScalarFactor("exp", complex(t - s)),
                )
            )
    return HaagerupDecomposition(pairs=tuple(pairs), source=f, quad_nodes=quad_nodes)


def doi_apply(
    decomposition: HaagerupDecomposition,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    k: np.ndarray,
) -> np.ndarray:
    """sum_n weight * left_n(L1) @ K @ right_n(L2)."""
    k = linalg.as_matrix(k, "K")
    if k.shape[0] != l1.dim or l1.dim != l2.dim:
        raise ValidationError("dimension mismatch between L1, L2 and K")
    out = np.zeros_like(k)
    for wt, lf, rf in decomposition.pairs:
        out += wt * (lf.eval_matrix(l1) @ k @ rf.eval_matrix(l2))
    return out


def _relative_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return linalg.op_norm(lhs - rhs) / (1.0 + linalg.op_norm(lhs))


def theorem42_residual(
    f: AnalyticFunction,
    pair: PerturbationPair,
    quad_nodes: int = DEFAULT_QUAD_NODES,
) -> float:
    """Representation check: f(L1) - f(L2) against the integral value.

    Returns ``||(f(L1) - f(L2)) - DOI(Df; L1, L2, L1 - L2)|| / (1 + ||f(L1) - f(L2)||)``.
    """
    decomposition = haagerup_decompose(f, quad_nodes)
    lhs = funcalc.eval_matrix(f, pair.first) - funcalc.eval_matrix(f, pair.second)
    rhs = doi_apply(decomposition, pair.first, pair.second, pair.difference)
    return _relative_residual(lhs, rhs)


def theorem41_residual(
    f: AnalyticFunction,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    quad_nodes: int = DEFAULT_QUAD_NODES,
) -> float:
    """Sandwich identity for unrelated L1, L2 (no bounded-difference assumption).

    Checks f(L1)R1R2 - R1 f(L2)R2 = sum_n left_n(L1)(R2 - R1) right_n(L2)
    with R_j = (L_j + iI)^{-1}.
    """
    decomposition = haagerup_decompose(f, quad_nodes)
    r1 = l1.shifted_inverse()
    r2 = l2.shifted_inverse()
    f1 = funcalc.eval_matrix(f, l1)
    f2 = funcalc.eval_matrix(f, l2)
    lhs = f1 @ r1 @ r2 - r1 @ f2 @ r2
    rhs = doi_apply(decomposition, l1, l2, r2 - r1)
    return _relative_residual(lhs, rhs)


def theorem51_residual(
    f: AnalyticFunction,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    r: np.ndarray,
    quad_nodes: int = DEFAULT_QUAD_NODES,
) -> float:
    """Sandwich identity with an interleaved bounded factor R.

    Checks f(L1)R1 R R2 - R1 R f(L2)R2 = sum_n left_n(L1)(R R2 - R1 R) right_n(L2).
    """
    r = linalg.as_matrix(r, "R")
    decomposition = haagerup_decompose(f, quad_nodes)
    r1 = l1.shifted_inverse()
    r2 = l2.shifted_inverse()
    f1 = funcalc.eval_matrix(f, l1)
    f2 = funcalc.eval_matrix(f, l2)
    lhs = f1 @ r1 @ r @ r2 - r1 @ r @ f2 @ r2
    rhs = doi_apply(decomposition, l1, l2, r @ r2 - r1 @ r)
    return _relative_residual(lhs, rhs)


def quasicommutator_residual(
    f: AnalyticFunction,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    r: np.ndarray,
    quad_nodes: int = DEFAULT_QUAD_NODES,
) -> float:
    """Representation check for f(L1)R - Rf(L2) against DOI over L1R - RL2."""
    r = linalg.as_matrix(r, "R")
    if r.shape[0] != l1.dim:
        raise ValidationError("R dimension mismatch")
    decomposition = haagerup_decompose(f, quad_nodes)
    j = l1.matrix @ r - r @ l2.matrix
    lhs = funcalc.eval_matrix(f, l1) @ r - r @ funcalc.eval_matrix(f, l2)
    rhs = doi_apply(decomposition, l1, l2, j)
    return _relative_residual(lhs, rhs)


def lipschitz_margin(f: AnalyticFunction, pair: PerturbationPair) -> tuple[float, float]:
    """(lhs, rhs) of ||f(L1) - f(L2)|| <= ol_bound(f) * ||L1 - L2||."""
    lhs = linalg.op_norm(
        funcalc.eval_matrix(f, pair.first) - funcalc.eval_matrix(f, pair.second)
    )
    rhs = funcalc.ol_bound(f) * linalg.op_norm(pair.difference)
    return lhs, rhs


def quasicommutator_margin(
    f: AnalyticFunction,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    r: np.ndarray,
) -> tuple[float, float]:
    """(lhs, rhs) of ||f(L1)R - Rf(L2)|| <= ol_bound(f) * ||L1 R - R L2||."""
    r = linalg.as_matrix(r, "R")
    lhs = linalg.op_norm(
        funcalc.eval_matrix(f, l1) @ r - r @ funcalc.eval_matrix(f, l2)
    )
    rhs = funcalc.ol_bound(f) * linalg.op_norm(l1.matrix @ r - r @ l2.matrix)
    return lhs, rhs


def s2_margin(f: AnalyticFunction, pair: PerturbationPair) -> tuple[float, float]:
    """(lhs, rhs) of the Hilbert-Schmidt estimate with the sup-derivative bound."""
    lhs = linalg.fro_norm(
        funcalc.eval_matrix(f, pair.first) - funcalc.eval_matrix(f, pair.second)
    )
    rhs = funcalc.sup_deriv_bound(f) * linalg.fro_norm(pair.difference)
    return lhs, rhs


def diagonal_schur_reference(
    f: AnalyticFunction, z_diag, w_diag, k: np.ndarray
) -> np.ndarray:
    """Oracle for diagonal arguments: entrywise [Df(z_i, w_j)] * K.

    For L1 = diag(z), L2 = diag(w) the double operator integral reduces to
    a Schur product; computed here purely from scalar divided differences.
    """
    z_diag = [complex(z) for z in z_diag]
    w_diag = [complex(w) for w in w_diag]
    k = linalg.as_matrix(k, "K")
    grid = np.array(
        [[funcalc.divided_difference(f, z, w) for w in w_diag] for z in z_diag]
    )
    return grid * k


def selfadjoint_reference(
    f: AnalyticFunction,
    l1: DissipativeMatrix,
    l2: DissipativeMatrix,
    k: np.ndarray,
) -> np.ndarray:
    """Oracle for self-adjoint arguments via spectral decomposition.

    With L1, L2 Hermitian (vanishing imaginary parts), computes
    U1 [Df(x_i, y_j) * (U1* K U2)] U2* from the Jacobi eigensolver --
    the classical spectral-measure evaluation of the double operator
    integral.
    """
    for l in (l1, l2):
        if float(np.linalg.norm(l.imaginary_part)) > 1e-12 * max(
            1.0, float(np.linalg.norm(l.matrix))
        ):
            raise ValidationError("selfadjoint_reference requires vanishing imaginary parts")
    k = linalg.as_matrix(k, "K")
    x, u1 = linalg.hermitian_eig(l1.hermitian_part)
    y, u2 = linalg.hermitian_eig(l2.hermitian_part)
    grid = np.array(
        [[funcalc.divided_difference(f, zi, wj) for wj in y] for zi in x]
    )
    return u1 @ (grid * (u1.conj().T @ k @ u2)) @ u2.conj().T


def converged_quad_nodes(
    residual_at,
    start: int = DEFAULT_QUAD_NODES,
    cap: int = QUAD_NODES_CAP,
    atol: float = QUAD_STAGNATION_ATOL,
) -> int:
    """Double the node count until the residual stagnates.

    ``residual_at`` maps a node count to a residual; doubling stops once
    successive residuals differ by less than ``atol`` (or ``cap`` is hit).
    """
    n = start
    previous = residual_at(n)
    while 2 * n <= cap:
        n *= 2
        current = residual_at(n)
        if abs(current - previous) < atol:
            return n
        previous = current
    return n


__all__ = [
    "DEFAULT_QUAD_NODES",
    "QUAD_NODES_CAP",
    "ScalarFactor",
    "HaagerupDecomposition",
    "haagerup_decompose",
    "doi_apply",
    "theorem41_residual",
    "theorem42_residual",
    "theorem51_residual",
    "quasicommutator_residual",
    "lipschitz_margin",
    "quasicommutator_margin",
    "s2_margin",
    "diagonal_schur_reference",
    "selfadjoint_reference",
    "converged_quad_nodes",
]
