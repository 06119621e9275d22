"""Deterministic dense complex linear algebra kernels.

Everything operates on numpy complex128 arrays and is written so that
repeated calls on identical inputs return bit-identical outputs: the
eigensolver is a cyclic Jacobi iteration with a fixed row-major rotation
order, and inversion is Gauss-Jordan with partial pivoting.  All functions
are pure; no hidden state.

Inner products follow the convention of being conjugate-linear in the
second argument: ``inner(x, y) == sum(x * conj(y))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPsd, ParseError, Singular

# Tolerances (relative unless stated otherwise).
TOL_HERM = 1e-10
TOL_EIG = 1e-10
TOL_PSD_REL = 1e-10     # scaled by (1 + ||A||_F)
TOL_INV_REL = 1e-12     # scaled by ||A||_F

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_THRESHOLD = 1e-14  # off-diagonal Frobenius threshold, scaled by ||A||_F


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting non-finite entries."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def as_vector(x) -> np.ndarray:
    """Coerce to a 1-D complex128 array, rejecting non-finite entries."""
    v = np.array(x, dtype=np.complex128)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got ndim={v.ndim}")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("vector contains NaN or Inf entries")
    return v


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(a)).T.copy()


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Inner product, conjugate-linear in the second argument."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(a)))


def hermitian_residual(a: np.ndarray) -> float:
    """Frobenius distance to the adjoint, scaled by 1 + ||A||_F."""
    a = np.asarray(a)
    return frobenius(a - adjoint(a)) / (1.0 + frobenius(a))


def is_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and hermitian_residual(a) <= tol


def hermitize(a: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix, (A + A*)/2."""
    a = np.asarray(a)
    return (a + adjoint(a)) / 2.0


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues ascending plus the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray   # float64, ascending
    eigenvectors: np.ndarray  # complex128, column k pairs with eigenvalues[k]

    def reconstruct(self) -> np.ndarray:
        """U diag(lambda) U*."""
        u = self.eigenvectors
        return (u * self.eigenvalues) @ adjoint(u)


def _jacobi_sweeps(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize an exactly Hermitian matrix by cyclic Jacobi rotations.

    Rotations run in fixed row-major order (p < q).  Each rotation first
    twists the pivot phase so the 2x2 subproblem is real symmetric, then
    applies the classic symmetric Schur rotation with |t| <= 1, which
    guarantees convergence of the cyclic sweep.
    """
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    norm_f = frobenius(h)
    if n == 1 or norm_f == 0.0:
        return np.diag(a).real.copy(), v

    stop = JACOBI_OFF_THRESHOLD * norm_f
    skip = stop / (2.0 * n)  # elements below this cannot push off(A) past stop

    for _ in range(JACOBI_MAX_SWEEPS):
        off = frobenius(a - np.diag(np.diag(a)))
        if off <= stop:
            return np.diag(a).real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absa = abs(apq)
                if absa <= skip:
                    continue
                phase = apq / absa
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absa)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp = c * phase
                sp = s * phase
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp * cp - colq * s
                a[:, q] = colp * sp + colq * c
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = rowp * np.conj(cp) - rowq * s
                a[q, :] = rowp * np.conj(sp) + rowq * c
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * cp - vq * s
                v[:, q] = vp * sp + vq * c

    off = frobenius(a - np.diag(np.diag(a)))
    if off <= stop:
        return np.diag(a).real.copy(), v
    raise NoConvergence(
        f"Jacobi did not reach off-diagonal norm {stop:.3e} in {JACOBI_MAX_SWEEPS} sweeps"
    )


def hermitian_eigen(a) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues come back sorted ascending, eigenvector columns permuted in
    lockstep; ties keep the Jacobi output order, so identical inputs give
    bit-identical results.

    Raises NotHermitian if the input fails the Hermiticity check and
    NoConvergence if the sweep budget is exhausted.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is not square: {m.shape[0]}x{m.shape[1]}")
    if hermitian_residual(m) > TOL_HERM:
        raise NotHermitian(f"Hermiticity residual {hermitian_residual(m):.3e} exceeds {TOL_HERM}")
    vals, vecs = _jacobi_sweeps(hermitize(m))
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(
        eigenvalues=vals[order].copy(), eigenvectors=vecs[:, order].copy()
    )


def psd_sqrt(a) -> np.ndarray:
    """Unique positive semidefinite square root of a Hermitian PSD matrix.

    Eigenvalues in [-tol_psd, 0) are clamped to zero before the root, where
    tol_psd = 1e-10 * (1 + ||A||_F); anything below -tol_psd raises NotPsd.
    """
    m = as_matrix(a)
    eig = hermitian_eigen(m)
    tol_psd = TOL_PSD_REL * (1.0 + frobenius(m))
    lo = float(eig.eigenvalues[0]) if eig.eigenvalues.size else 0.0
    if lo < -tol_psd:
        raise NotPsd(f"minimum eigenvalue {lo:.3e} is below -{tol_psd:.3e}")
    vals = np.where(eig.eigenvalues < 0.0, 0.0, eig.eigenvalues)
    u = eig.eigenvectors
    root = (u * np.sqrt(vals)) @ adjoint(u)
    return hermitize(root)


def singular_extremes(a: np.ndarray) -> tuple[float, float]:
    """Smallest and largest singular values, via the eigenvalues of A*A."""
    m = as_matrix(a)
    gram = hermitize(adjoint(m) @ m)
    vals = hermitian_eigen(gram).eigenvalues
    return float(np.sqrt(max(vals[0], 0.0))), float(np.sqrt(max(vals[-1], 0.0)))


def invert(a) -> np.ndarray:
    """Inverse of a square matrix by Gauss-Jordan with partial pivoting.

    Raises Singular when the smallest singular value is at or below
    1e-12 * ||A||_F.
    """
    m = as_matrix(a)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"cannot invert a {m.shape[0]}x{m.shape[1]} matrix")
    sigma_min, _ = singular_extremes(m)
    if sigma_min <= TOL_INV_REL * frobenius(m):
        raise Singular(f"smallest singular value {sigma_min:.3e} is within the singular tolerance")
    aug = np.concatenate([m.copy(), np.eye(n, dtype=np.complex128)], axis=1)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(aug[k:, k])))
        if piv != k:
            aug[[k, piv], :] = aug[[piv, k], :]
        aug[k, :] = aug[k, :] / aug[k, k]
        col = aug[:, k].copy()
        col[k] = 0.0
        aug -= np.outer(col, aug[k, :])
    return aug[:, n:].copy()


# --- JSON encoding -----------------------------------------------------------
#
# Matrix: {"rows": n, "cols": m, "data": [[re, im], ...]} with data row-major.
# Vector: {"dim": n, "entries": [[re, im], ...]}.


def matrix_to_json(a: np.ndarray) -> dict:
    m = as_matrix(a)
    data = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("matrix JSON must be an object")
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"matrix JSON missing or malformed field: {exc}") from exc
    if rows <= 0 or cols <= 0:
        raise ParseError(f"matrix dimensions must be positive, got {rows}x{cols}")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"matrix data length {len(data) if isinstance(data, list) else '?'} "
                         f"does not match {rows}x{cols}")
    try:
        flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix data entries must be [re, im] pairs: {exc}") from exc
    if not np.all(np.isfinite(flat.view(np.float64))):
        raise ParseError("matrix data contains NaN or Inf")
    return flat.reshape(rows, cols)


def vector_to_json(x: np.ndarray) -> dict:
    v = as_vector(x)
    return {"dim": int(v.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in v]}


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("vector JSON must be an object")
    try:
        dim, entries = int(obj["dim"]), obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"vector JSON missing or malformed field: {exc}") from exc
    if not isinstance(entries, list) or len(entries) != dim:
        raise ParseError("vector entries length does not match dim")
    try:
        v = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"vector entries must be [re, im] pairs: {exc}") from exc
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ParseError("vector entries contain NaN or Inf")
    return v
