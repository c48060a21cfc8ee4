"""Derivative ratio A with Df = A Dg at a common zero, and its classification.

A real 2x2 matrix acts on C = R^2 as multiplication by a complex number
exactly when it has the form [[u, -v], [v, u]] with u + iv != 0.  Any A
splits as ``z -> lam*z + mu*conj(z)``; ``lam`` is read off the symmetric /
antisymmetric parts and ``mu`` is the obstruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .autodiff import JacobianR
from .errors import InconsistentKernels, RankDeficient
from .zerofind import RANK_TOL, singular_values

CLASSIFY_TOL = 1e-6
RATIO_TOL = 1e-6
EPS = 1e-300


@dataclass(frozen=True)
class ComplexLinear:
    lam: complex
    defect: float

    name = "complex_linear"


@dataclass(frozen=True)
class NotComplexLinear:
    defect: float
    reason: str  # "defect", "negative_determinant" or "vanishing"

    name = "not_complex_linear"


Classification = ComplexLinear | NotComplexLinear


def scaled_rotation(lam: complex) -> np.ndarray:
    """Matrix of multiplication by ``lam`` on R^2."""
    return np.array([[lam.real, -lam.imag], [lam.imag, lam.real]])


def complex_part(a: np.ndarray) -> complex:
    """The complex-linear part u + iv of a 2x2 matrix."""
    return complex((a[0, 0] + a[1, 1]) / 2, (a[1, 0] - a[0, 1]) / 2)


def classify_scaled_rotation(a: np.ndarray, tol: float = CLASSIFY_TOL) -> Classification:
    """Decide whether ``a`` is a (nonzero) scaled rotation.

    The defect is the larger of |A00 - A11| and |A01 + A10| relative to the
    operator norm of A.  The equal-singular-values test is evaluated as a
    cross-check and must agree.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (2, 2) or not np.all(np.isfinite(a)):
        raise ValueError("expected a finite 2x2 matrix")
    s1, s2 = singular_values(a)
    det = float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    lam = complex_part(a)
    defect = float(max(abs(a[0, 0] - a[1, 1]), abs(a[0, 1] + a[1, 0])) / max(s1, EPS))

    linear = defect <= tol and det > 0 and abs(lam) > EPS
    # (s1 - s2)/s1 lies in [defect, sqrt(2)*defect] whenever det > 0
    gap = (s1 - s2) / max(s1, EPS)
    svd_strict = det > 0 and gap <= tol * (1 - 1e-9)
    svd_loose = det > 0 and gap <= math.sqrt(2) * tol * (1 + 1e-9)
    if (svd_strict and not linear and abs(lam) > EPS) or (linear and not svd_loose):
        raise AssertionError(
            f"singular value cross-check disagrees: defect={defect:.3e}, gap={gap:.3e}"
        )

    if linear:
        return ComplexLinear(lam, defect)
    if abs(lam) <= EPS and s1 <= EPS:
        reason = "vanishing"
    elif det <= 0:
        reason = "negative_determinant"
    else:
        reason = "defect"
    return NotComplexLinear(defect, reason)


@dataclass(frozen=True)
class DerivativeRatio:
    A: np.ndarray
    residual: float
    sigma: tuple[float, float]
    det: float
    classification: Classification

    @property
    def complex_linear(self) -> bool:
        return isinstance(self.classification, ComplexLinear)

    def apply(self, z: complex) -> complex:
        w = self.A @ np.array([z.real, z.imag])
        return complex(w[0], w[1])

    def as_dict(self) -> dict:
        cls = self.classification
        out = {
            "A": self.A.tolist(),
            "residual": self.residual,
            "sigma": list(self.sigma),
            "det": self.det,
            "classification": cls.name,
            "defect": cls.defect,
        }
        if isinstance(cls, ComplexLinear):
            out["lambda"] = [cls.lam.real, cls.lam.imag]
        else:
            out["reason"] = cls.reason
        return out


def derivative_ratio(jf: JacobianR | np.ndarray, jg: JacobianR | np.ndarray,
                     ratio_tol: float = RATIO_TOL, rank_tol: float = RANK_TOL,
                     classify_tol: float = CLASSIFY_TOL) -> DerivativeRatio:
    """Least-squares solution A of ``Jf = A Jg`` through the Gram system of Jg."""
    f = jf.entries if isinstance(jf, JacobianR) else np.asarray(jf, dtype=float)
    g = jg.entries if isinstance(jg, JacobianR) else np.asarray(jg, dtype=float)
    if f.shape != g.shape or f.shape[0] != 2:
        raise ValueError(f"Jacobian shapes differ: {f.shape} vs {g.shape}")
    s2g = singular_values(g)[1]
    if s2g < rank_tol:
        raise RankDeficient(f"Jacobian of g has sigma2 = {s2g:.3e} < {rank_tol:g}")
    # normal equations A (Jg Jg^T) = Jf Jg^T; exact for the rational fixtures
    a = np.linalg.solve(g @ g.T, g @ f.T).T
    residual = float(np.linalg.norm(f - a @ g))
    bound = ratio_tol * (1 + float(np.linalg.norm(f)))
    if residual > bound:
        raise InconsistentKernels(
            f"||Jf - A Jg|| = {residual:.3e} exceeds {bound:.3e}: the pair does not share tangent data here"
        )
    s1, s2 = singular_values(a)
    det = float(np.linalg.det(a))
    return DerivativeRatio(a, residual, (s1, s2), det, classify_scaled_rotation(a, classify_tol))
