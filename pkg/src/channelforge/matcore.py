"""Dense complex linear algebra primitives.

Matrices are plain 2-D ``numpy`` arrays of ``complex128``. Vectorization is
ROW-major throughout: ``vec(Z)[i*cols + j] == Z[i, j]``. Every identity used
elsewhere in the package (the Kronecker action on vectorized operators, the
reshuffle between superoperator and Choi matrix, the partial-trace readouts)
follows from this one convention, so it must not be changed locally.

The Hermitian eigensolver is a cyclic Jacobi method. A compiled kernel is
used when available; set ``CHANNELFORGE_PURE_PYTHON=1`` to force the
pure-Python kernel.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotHermitianError, NumericalError

if os.environ.get("CHANNELFORGE_PURE_PYTHON", "") not in ("", "0"):
    from ._jacobi_py import jacobi_sweeps as _jacobi_sweeps

    BACKEND = "python"
else:
    try:
        from ._jacobi import jacobi_sweeps as _jacobi_sweeps

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from ._jacobi_py import jacobi_sweeps as _jacobi_sweeps

        BACKEND = "python"

HERMITIAN_TOL = 1e-9
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def as_matrix(x) -> np.ndarray:
    """Coerce ``x`` to a finite 2-D complex128 array."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(m, what="matrix"):
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} must be square, got {m.shape}")
    return m.shape[0]


def _isqrt(d, what):
    n = math.isqrt(d)
    if n * n != d:
        raise DimensionError(f"{what}: {d} is not a perfect square")
    return n


def identity(n) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def max_abs(m) -> float:
    """Largest absolute entry; the deviation measure used by all checks."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def kron(x, y) -> np.ndarray:
    return np.kron(as_matrix(x), as_matrix(y))


def vec(z) -> np.ndarray:
    """Stack the rows of ``z`` into a column of length rows*cols."""
    return as_matrix(z).reshape(-1, 1).copy()


def mat(v, n: int) -> np.ndarray:
    """Inverse of :func:`vec` for square ``n x n`` matrices."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size != n * n or (v.ndim == 2 and 1 not in v.shape) or v.ndim > 2:
        raise DimensionError(f"cannot matricize shape {v.shape} into {n}x{n}")
    return v.reshape(n, n).copy()


def reshuffle(a, n: int | None = None) -> np.ndarray:
    """Swap the middle indices: ``out[(i', i), (j', j)] = a[(i', j'), (i, j)]``.

    This maps a superoperator to its Choi (dynamical) matrix and back; it is
    an involution.
    """
    a = as_matrix(a)
    d = _square(a, "reshuffle input")
    if n is None:
        n = _isqrt(d, "reshuffle input")
    elif n * n != d:
        raise DimensionError(f"reshuffle: expected {n * n}x{n * n}, got {a.shape}")
    return a.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(d, d).copy()


def partial_trace(m, dim_first: int, dim_second: int, which: str = "second") -> np.ndarray:
    """Trace out one factor of a matrix on ``C^dim_first (x) C^dim_second``.

    With row-major ``vec``, ``partial_trace(|X>><<Y|, n, n, "second") == X @ Y^dag``
    and ``partial_trace(|X>><<Y|, n, n, "first") == X^T @ Y^*``.
    """
    m = as_matrix(m)
    d = dim_first * dim_second
    if m.shape != (d, d):
        raise DimensionError(f"partial_trace: expected {d}x{d}, got {m.shape}")
    t = m.reshape(dim_first, dim_second, dim_first, dim_second)
    if which == "second":
        return np.einsum("ajbj->ab", t)
    if which == "first":
        return np.einsum("jajb->ab", t)
    raise ValueError(f"which must be 'first' or 'second', not {which!r}")


def hermiticity_deviation(h) -> float:
    h = as_matrix(h)
    return max_abs(h - h.conj().T)


@dataclass(frozen=True)
class EigDecomposition:
    """Spectral decomposition ``h = sum_k w_k v_k v_k^dag``.

    ``eigenvalues`` are descending; ``eigenvectors[:, k]`` pairs with
    ``eigenvalues[k]``. Each vector's first non-negligible component is real
    and positive, which makes output files reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    sweeps: int = 0

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k : k + 1].copy()

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phases(v):
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-10)
        if nz.size:
            z = col[nz[0]]
            v[:, k] = col * (abs(z) / z)
    return v


def hermitian_eig(h, tol: float = HERMITIAN_TOL) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Square matrix, Hermitian up to ``tol`` (largest entry of ``h - h^dag``).
    tol : float
        Hermiticity tolerance. The matrix is symmetrized before rotating.

    Raises
    ------
    NotHermitianError
        If ``h`` deviates from Hermitian by more than ``tol``.
    """
    h = as_matrix(h)
    _square(h)
    dev = hermiticity_deviation(h)
    if dev > tol:
        raise NotHermitianError(dev)
    hs = 0.5 * (h + h.conj().T)
    w, v, sweeps, converged = _jacobi_sweeps(hs, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise NumericalError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(-w, kind="stable")
    w = np.asarray(w)[order]
    v = _fix_phases(np.asarray(v)[:, order].copy())
    residual = float(np.max(np.linalg.norm(hs @ v - v * w, axis=0))) if w.size else 0.0
    return EigDecomposition(w, v, residual, sweeps)


def matmul(x, y) -> np.ndarray:
    x, y = as_matrix(x), as_matrix(y)
    if x.shape[1] != y.shape[0]:
        raise DimensionError(f"matmul: {x.shape} @ {y.shape}")
    return x @ y


def adjoint(x) -> np.ndarray:
    return as_matrix(x).conj().T.copy()


def _same_shape(x, y, op):
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise DimensionError(f"{op}: shapes {x.shape} and {y.shape} differ")
    return x, y


def add(x, y) -> np.ndarray:
    x, y = _same_shape(x, y, "add")
    return x + y


def scale(x, c) -> np.ndarray:
    return complex(c) * as_matrix(x)


def frobenius_distance(x, y) -> float:
    x, y = _same_shape(x, y, "frobenius_distance")
    return float(np.sqrt(np.sum(np.abs(x - y) ** 2)))
