"""Norm tests that detect spectrum near a point.

For self-adjoint A with m >= ||A - x||, the value ||m^2 - (A - x)^2|| exceeds
m^2 - r^2 exactly when A has spectrum within distance r of x.  For unitary U
and |E| = 1, ||1 + conj(E) U|| exceeds sqrt(4 - r^2) exactly when U has
spectrum within distance r of E.  Norms are taken from eigenvalues of the
(normal) polynomial image, so the logical tests carry no iteration error.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgument, PreconditionViolation

HERMITIAN_TOL = 1e-12


def _self_adjoint(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("expected a square matrix")
    if np.abs(A - A.conj().T).max(initial=0.0) > HERMITIAN_TOL:
        raise InvalidArgument("matrix is not self-adjoint")
    return A


def _unitary(U) -> np.ndarray:
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidArgument("expected a square matrix")
    if np.abs(U.conj().T @ U - np.eye(len(U))).max(initial=0.0) > HERMITIAN_TOL:
        raise InvalidArgument("matrix is not unitary")
    return U


def spectral_norm(A) -> float:
    A = _self_adjoint(A)
    return float(np.abs(np.linalg.eigvalsh(A)).max(initial=0.0))


def p2_norm(A, p0: float, p1: float, p2: float) -> float:
    """||p0 + p1 A + p2 A^2|| for self-adjoint A and real coefficients."""
    A = _self_adjoint(A)
    lam = np.linalg.eigvalsh(A)
    return float(np.abs(p0 + p1 * lam + p2 * lam ** 2).max(initial=0.0))


def presence_probe(A, x: float, m: float, r: float) -> bool:
    """True iff the spectrum of A meets the open interval (x - r, x + r)."""
    A = _self_adjoint(A)
    if not r < m:
        raise InvalidArgument("radius must be smaller than m")
    shifted = A - x * np.eye(len(A))
    if m < spectral_norm(shifted):
        raise PreconditionViolation("m must bound the norm of A - x")
    return p2_norm(shifted, m * m, 0.0, -1.0) > m * m - r * r


def unitary_probe(U, E: complex, r: float) -> bool:
    """True iff the spectrum of U meets the open disk of radius r around E."""
    U = _unitary(U)
    if not math.isclose(abs(E), 1.0, rel_tol=0, abs_tol=1e-12):
        raise InvalidArgument("E must lie on the unit circle")
    if not r < 2:
        raise InvalidArgument("radius must be smaller than 2")
    # 1 + conj(E) U is normal; its norm is the largest modulus of its eigenvalues
    lam = np.linalg.eigvals(U)
    norm = float(np.abs(1 + np.conj(E) * lam).max(initial=0.0))
    return norm > math.sqrt(4 - r * r)
