"""dissipcalc: functional calculus for dissipative matrices.

Verifies, at desk scale, double-operator-integral representations of
f(L1) - f(L2) and f(L1)R - Rf(L2) for dissipative matrices together with
the operator-Lipschitz and Hilbert-Schmidt estimates they imply.
"""

from dissipcalc._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
