"""Dense complex linear algebra built on the toolkit's own kernels.

Singular values go through Householder tridiagonalization of A†A followed
by implicit-shift QL; this squares the condition number, which is fine at
desk scale (we never need s_n/s_1 below ~1e-7). General eigenvalues use
unitary Hessenberg reduction plus single-shift complex QR with Wilkinson
shifts. No eigenvectors anywhere.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EigenConvergenceError, NumericalError, ValidationError

DEFLATION_TOL = 1e-13
MGS_DROP_TOL = 1e-12


@dataclass
class SpectrumResult:
    kind: str  # "singular" | "eigen"
    values: np.ndarray
    residual_tol: float = 0.0
    iterations: int = 0


def _as_matrix(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValidationError("expected a 2-D matrix")
    if not np.all(np.isfinite(A.view(np.float64))):
        raise ValidationError("matrix entries must be finite")
    return A


def singular_values(A):
    """All singular values of A (rows >= such that A†A is cols x cols), descending."""
    A = _as_matrix(A)
    G = A.conj().T @ A
    d, e = kernels.hermitian_tridiag(G)
    w, ok = kernels.tridiag_eigvals(d, e)
    if not ok:
        raise EigenConvergenceError(
            "tridiagonal QL did not converge", partial=np.sqrt(np.clip(w, 0.0, None))
        )
    s = np.sqrt(np.clip(w, 0.0, None))[::-1]
    return SpectrumResult(kind="singular", values=s)


def smallest_singular_value(A):
    return float(singular_values(A).values[-1])


def eigenvalues(A):
    """Eigenvalue multiset of a square complex matrix."""
    A = _as_matrix(A)
    n, m = A.shape
    if n != m:
        raise ValidationError("eigenvalues requires a square matrix")
    if n == 0:
        return SpectrumResult(kind="eigen", values=np.zeros(0, dtype=np.complex128))
    H = kernels.hessenberg_reduce(A)
    eigs, found, ok, sweeps = kernels.hessenberg_eigvals(
        H, tol=DEFLATION_TOL, max_iter_per_eig=100
    )
    if not ok:
        raise EigenConvergenceError(
            f"QR iteration stalled after deflating {found} of {n} eigenvalues",
            partial=eigs[:found],
        )
    return SpectrumResult(kind="eigen", values=eigs, iterations=int(sweeps))


def dist_to_subspace(x, span):
    """Euclidean distance from x to the linear span of the given vectors.

    Modified Gram-Schmidt with one reorthogonalization pass; numerically
    dependent vectors are dropped, not errored.
    """
    x = np.asarray(x, dtype=np.complex128)
    basis = orthonormal_basis(span)
    r = x.copy()
    for q in basis:
        r -= q * np.vdot(q, r)
    for q in basis:  # one reorthogonalization pass
        r -= q * np.vdot(q, r)
    return float(np.linalg.norm(r))


def orthonormal_basis(vectors):
    """MGS orthonormal basis of the span; dependent inputs are dropped."""
    basis = []
    for v in vectors:
        v = np.asarray(v, dtype=np.complex128).copy()
        v0 = np.linalg.norm(v)
        if v0 == 0.0:
            continue
        for q in basis:
            v -= q * np.vdot(q, v)
        for q in basis:
            v -= q * np.vdot(q, v)
        nv = np.linalg.norm(v)
        if nv <= MGS_DROP_TOL * v0:
            continue
        basis.append(v / nv)
    return basis


class IncrementalSpan:
    """Grows an orthonormal basis one vector at a time (for row-span sweeps)."""

    def __init__(self):
        self._basis = []

    def distance(self, x):
        x = np.asarray(x, dtype=np.complex128)
        r = x.copy()
        for q in self._basis:
            r -= q * np.vdot(q, r)
        for q in self._basis:
            r -= q * np.vdot(q, r)
        return float(np.linalg.norm(r)), r

    def add(self, x):
        """Add x to the span; returns dist(x, previous span)."""
        d, r = self.distance(x)
        x0 = np.linalg.norm(np.asarray(x))
        if x0 > 0.0 and d > MGS_DROP_TOL * x0:
            self._basis.append(r / d)
        return d


def log_abs_det(A):
    """log|det A| via partial-pivoted elimination; -inf when a pivot underflows."""
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValidationError("log_abs_det requires a square matrix")
    return float(kernels.lu_logabsdet(A))


def operator_and_hs_norms(A):
    A = _as_matrix(A)
    s1 = float(singular_values(A).values[0])
    hs = float(np.linalg.norm(A))
    return s1, hs


def negative_second_moment_check(A):
    """Exact identity: sum s_j^-2 == sum dist(row_j, span of other rows)^-2.

    Returns (lhs, rhs, rel_err). Refuses near-singular input.
    """
    A = _as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValidationError("identity check requires a square matrix")
    s = singular_values(A).values
    if s[-1] <= 1e-10 * s[0]:
        raise NumericalError(
            f"matrix too close to singular for the identity check "
            f"(s_n/s_1 = {s[-1] / s[0]:.3e})"
        )
    lhs = float(np.sum(1.0 / s**2))
    rhs = 0.0
    for j in range(n):
        others = [A[i] for i in range(n) if i != j]
        d = dist_to_subspace(A[j], others)
        if d == 0.0:
            raise NumericalError(f"row {j} lies in the span of the other rows")
        rhs += 1.0 / d**2
    rel_err = abs(lhs - rhs) / lhs
    return lhs, rhs, rel_err
