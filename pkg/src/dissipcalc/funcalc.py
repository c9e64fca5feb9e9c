"""Analytic functions on the closed upper half-plane and their calculus.

The working function class is

    f(z) = c0 + m*z + sum_j a_j / (z - lambda_j) + sum_k b_k * exp(i t_k z)

with every pole ``lambda_j`` strictly below the real axis and every time
``t_k >= 0``.  Each member is analytic in the open upper half-plane,
continuous and Lipschitz on its closure, and unbounded only through the
linear term.  The class is closed under addition and admits exact
divided-difference factorizations, which is what the double-operator
integral engine (:mod:`dissipcalc.doi`) needs.

Scalar evaluation, the first derivative, the divided difference, matrix
evaluation on dissipative matrices, and the two norm bounds used by the
Lipschitz checks live here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from dissipcalc import dissipative, linalg
from dissipcalc.errors import ValidationError

# Relative separation below which the divided difference switches from the
# direct quotient to the cancellation-free termwise form.
H_SWITCH = 1e-4

# phi1(u) = (e^u - 1)/u: series below this radius, direct quotient above.
_PHI1_SERIES_RADIUS = 0.5
# 1/(k+1)! for k = 0..12; the k=12 tail at |u| = 0.5 is below 2e-14.
_PHI1_COEFFS = tuple(
    1.0 / _f for _f in (1, 2, 6, 24, 120, 720, 5040, 40320, 362880,
                        3628800, 39916800, 479001600, 6227020800)
)


def _phi1(u: complex) -> complex:
    """(e^u - 1)/u, continuously extended by phi1(0) = 1."""
    if abs(u) < _PHI1_SERIES_RADIUS:
        acc = 0.0 + 0.0j
        for c in reversed(_PHI1_COEFFS):
            acc = acc * u + c
        return acc
    return (cmath.exp(u) - 1.0) / u


def _domain_point(z, name: str = "z") -> complex:
    z = complex(z)
    if not (cmath.isfinite(z)):
        raise ValidationError(f"{name} must be finite")
    if z.imag < 0:
        raise ValidationError(
            f"{name} = {z} lies outside the closed upper half-plane"
        )
    return z


@dataclass(frozen=True)
class AnalyticFunction:
    """Immutable term list: constant, linear, resolvent and exponential parts.

    ``resolvent_terms`` holds (coefficient, pole) with Im(pole) < 0;
    ``exponential_terms`` holds (coefficient, time) with time >= 0.
    """

    constant: complex = 0j
    linear: complex = 0j
    resolvent_terms: tuple[tuple[complex, complex], ...] = field(default_factory=tuple)
    exponential_terms: tuple[tuple[complex, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constant", complex(self.constant))
        object.__setattr__(self, "linear", complex(self.linear))
        res = []
        for a, lam in self.resolvent_terms:
            a, lam = complex(a), complex(lam)
            if not (cmath.isfinite(a) and cmath.isfinite(lam)):
                raise ValidationError("resolvent term must be finite")
            if lam.imag >= 0:
                raise ValidationError(
                    f"pole {lam} must lie strictly below the real axis"
                )
            res.append((a, lam))
        exp = []
        for b, t in self.exponential_terms:
            b, t = complex(b), float(t)
            if not (cmath.isfinite(b) and math.isfinite(t)):
                raise ValidationError("exponential term must be finite")
            if t < 0:
                raise ValidationError(f"exponential time {t} must be >= 0")
            exp.append((b, t))
        object.__setattr__(self, "resolvent_terms", tuple(res))
        object.__setattr__(self, "exponential_terms", tuple(exp))

    def __add__(self, other: "AnalyticFunction") -> "AnalyticFunction":
        if not isinstance(other, AnalyticFunction):
            return NotImplemented
        return AnalyticFunction(
            constant=self.constant + other.constant,
            linear=self.linear + other.linear,
            resolvent_terms=self.resolvent_terms + other.resolvent_terms,
            exponential_terms=self.exponential_terms + other.exponential_terms,
        )

    def __call__(self, z: complex) -> complex:
        return eval_scalar(self, z)

    def to_text(self) -> str:
        """Serialize as one term per line (the config-file function form)."""
        lines = []
        if self.constant != 0:
            lines.append(f"const {_num(self.constant.real)} {_num(self.constant.imag)}")
        if self.linear != 0:
            lines.append(f"linear {_num(self.linear.real)} {_num(self.linear.imag)}")
        for a, lam in self.resolvent_terms:
            lines.append(
                f"res {_num(a.real)} {_num(a.imag)} {_num(lam.real)} {_num(lam.imag)}"
            )
        for b, t in self.exponential_terms:
            lines.append(f"exp {_num(b.real)} {_num(b.imag)} {_num(t)}")
        return "\n".join(lines)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def constant_fn(c: complex) -> AnalyticFunction:
    return AnalyticFunction(constant=c)


def linear_fn(m: complex) -> AnalyticFunction:
    return AnalyticFunction(linear=m)


def resolvent_fn(a: complex, pole: complex) -> AnalyticFunction:
    """a / (z - pole) with Im(pole) < 0."""
    return AnalyticFunction(resolvent_terms=((a, pole),))


def exponential_fn(b: complex, t: float) -> AnalyticFunction:
    """b * exp(i t z) with t >= 0."""
    return AnalyticFunction(exponential_terms=((b, t),))


def parse_function(text: str) -> AnalyticFunction:
    """Parse the one-term-per-line form; blank lines and # comments allowed.

    Raises ValidationError with the offending 1-based line number.
    """
    constant = 0j
    linear = 0j
    res: list[tuple[complex, complex]] = []
    exp: list[tuple[complex, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind, args = fields[0], fields[1:]
        try:
            values = [float(v) for v in args]
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: non-numeric field in {raw!r}") from exc
        if kind == "const" and len(values) == 2:
            constant += complex(values[0], values[1])
        elif kind == "linear" and len(values) == 2:
            linear += complex(values[0], values[1])
        elif kind == "res" and len(values) == 4:
            res.append((complex(values[0], values[1]), complex(values[2], values[3])))
        elif kind == "exp" and len(values) == 3:
            exp.append((complex(values[0], values[1]), values[2]))
        else:
            raise ValidationError(
                f"line {lineno}: expected 'const RE IM', 'linear RE IM', "
                f"'res RE_a IM_a RE_p IM_p' or 'exp RE_b IM_b T', got {raw!r}"
            )
    try:
        return AnalyticFunction(
            constant=constant,
            linear=linear,
            resolvent_terms=tuple(res),
            exponential_terms=tuple(exp),
        )
    except ValidationError as exc:
        raise ValidationError(f"invalid function: {exc}") from exc


def eval_scalar(f: AnalyticFunction, z) -> complex:
    """f(z) for z in the closed upper half-plane."""
    z = _domain_point(z)
    out = f.constant + f.linear * z
    for a, lam in f.resolvent_terms:
        out += a / (z - lam)
    for b, t in f.exponential_terms:
        out += b * cmath.exp(1j * t * z)
    return out


def eval_deriv(f: AnalyticFunction, z) -> complex:
    """f'(z) for z in the closed upper half-plane."""
    z = _domain_point(z)
    out = f.linear + 0j
    for a, lam in f.resolvent_terms:
        out += -a / ((z - lam) * (z - lam))
    for b, t in f.exponential_terms:
        out += 1j * b * t * cmath.exp(1j * t * z)
    return out


def divided_difference(f: AnalyticFunction, z, w) -> complex:
    """(f(z) - f(w))/(z - w), extended by f'(z) on the diagonal.

    Beyond a relative separation of :data:`H_SWITCH` the direct quotient is
    used; below it the cancellation-free termwise form takes over (the
    exponential terms via the Duhamel integral in closed form).
    """
    z = _domain_point(z, "z")
    w = _domain_point(w, "w")
    if z == w:
        return eval_deriv(f, z)
    if abs(z - w) > H_SWITCH * (1.0 + abs(z) + abs(w)):
        return (eval_scalar(f, z) - eval_scalar(f, w)) / (z - w)
    out = f.linear + 0j
    for a, lam in f.resolvent_terms:
        out += -a / ((z - lam) * (w - lam))
    for b, t in f.exponential_terms:
        out += 1j * b * t * cmath.exp(1j * t * w) * _phi1(1j * t * (z - w))
    return out


def eval_matrix(f: AnalyticFunction, l: dissipative.DissipativeMatrix):
    """f(L) by termwise calculus: shifts, resolvents and exponentials."""
    ident = linalg.identity(l.dim)
    out = f.constant * ident + f.linear * l.matrix
    for a, lam in f.resolvent_terms:
        out = out + a * dissipative.resolvent(l, lam)
    for b, t in f.exponential_terms:
        out = out + b * linalg.expm(1j * t * l.matrix)
    return out


def commutation_check(f: AnalyticFunction, l: dissipative.DissipativeMatrix) -> float:
    """Relative commutator norm of f(L) with (L + iI)^{-1}; ~0 by calculus."""
    r = l.shifted_inverse()
    fl = eval_matrix(f, l)
    num = linalg.op_norm(fl @ r - r @ fl)
    return num / (1.0 + linalg.op_norm(fl))


def sup_deriv_bound(f: AnalyticFunction) -> float:
    """Triangle-inequality upper bound on sup |f'| over the upper half-plane.

    ``|m| + sum |a_j|/delta_j^2 + sum |b_k| t_k`` with ``delta_j`` the
    distance of the pole from the real axis; used by the Hilbert-Schmidt
    estimate.
    """
    out = abs(f.linear)
    for a, lam in f.resolvent_terms:
        out += abs(a) / (lam.imag * lam.imag)
    for b, t in f.exponential_terms:
        out += abs(b) * t
    return out


def ol_bound(f: AnalyticFunction) -> float:
    """Upper bound on the operator-Lipschitz seminorm of f.

    Computed from the explicit divided-difference factorization: the linear
    term contributes |m|, each resolvent term |a_j|/delta_j^2 (rank-one
    factorization), each exponential term |b_k| t_k (the L1 mass of its
    Duhamel integral).  All Lipschitz checks treat this as a one-sided
    certificate, never as the exact seminorm.
    """
    out = abs(f.linear)
    for a, lam in f.resolvent_terms:
        out += abs(a) / (lam.imag * lam.imag)
    for b, t in f.exponential_terms:
        out += abs(b) * t
    return out


__all__ = [
    "H_SWITCH",
    "AnalyticFunction",
    "constant_fn",
    "linear_fn",
    "resolvent_fn",
    "exponential_fn",
    "parse_function",
    "eval_scalar",
    "eval_deriv",
    "divided_difference",
    "eval_matrix",
    "commutation_check",
    "sup_deriv_bound",
    "ol_bound",
]
