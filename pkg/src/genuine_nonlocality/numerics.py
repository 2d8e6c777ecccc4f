"""
Dense complex linear algebra helpers.

Everything here works on plain ``numpy`` arrays: complex matrices are
``complex128`` 2-D arrays, real linear systems are ``float64`` 2-D arrays of
shape ``(equations, unknowns)``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import ShapeError

DEFAULT_TOL = 1e-9


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; 1-D inputs are treated as column vectors."""
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    """Left-to-right Kronecker product of a non-empty sequence."""
    return reduce(np.kron, factors)


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def _require_square(u: np.ndarray) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {u.shape}")


def is_unitary(u: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """
    Check ``u^dagger u = I`` entrywise.

    Parameters
    ----------
    u : ndarray
        Square complex matrix.
    tol : float
        Largest admissible absolute deviation of any entry of ``u^dagger u``
        from the identity.

    Raises
    ------
    ShapeError
        If ``u`` is not square.
    """
    u = np.asarray(u)
    _require_square(u)
    if not np.all(np.isfinite(u)):
        return False
    dev = adjoint(u) @ u - np.eye(u.shape[0])
    return bool(np.max(np.abs(dev), initial=0.0) <= tol)


def rank_threshold(singular_values: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Singular values at or below this value count as zero."""
    smax = float(singular_values[0]) if singular_values.size else 0.0
    return tol * max(1.0, smax)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Descending singular values of a real matrix (empty for an empty matrix)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def null_space(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Orthonormal basis of the kernel of a real matrix.

    A singular value ``s`` is treated as zero iff
    ``s <= tol * max(1, s_max)``.

    Parameters
    ----------
    a : ndarray, shape (m, n)
        Real coefficient matrix; ``m`` may be zero.
    tol : float
        Relative rank tolerance.

    Returns
    -------
    ndarray, shape (k, n)
        Rows form an orthonormal basis of ``{v : a v = 0}``; ``k == 0`` means
        the kernel is trivial.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D coefficient matrix, got shape {a.shape}")
    m, n = a.shape
    if n == 0:
        raise ShapeError("linear system needs at least one unknown")
    if m == 0:
        return np.eye(n)
    if m > n:
        # same singular values and right singular vectors, much smaller SVD
        a = np.linalg.qr(a, mode="r")
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.count_nonzero(s > rank_threshold(s, tol)))
    return vt[rank:].copy()


def matrix_rank(a: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Rank under the same threshold rule as :func:`null_space`."""
    s = singular_values(a)
    return int(np.count_nonzero(s > rank_threshold(s, tol)))


def herm_to_vec(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Real coordinates of a Hermitian matrix.

    Layout: the ``d`` real diagonal entries, then for each upper-triangular
    pair ``(a, b)`` in row-major order the two reals ``Re m[a, b]`` and
    ``Im m[a, b]``.
    """
    m = np.asarray(m, dtype=complex)
    _require_square(m)
    if np.max(np.abs(m - adjoint(m)), initial=0.0) > tol:
        raise ShapeError("matrix is not Hermitian within tolerance")
    d = m.shape[0]
    rows, cols = np.triu_indices(d, 1)
    upper = m[rows, cols]
    pairs = np.empty(2 * upper.size)
    pairs[0::2] = upper.real
    pairs[1::2] = upper.imag
    return np.concatenate([np.diagonal(m).real, pairs])


def vec_to_herm(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`herm_to_vec`; the result is exactly Hermitian."""
    v = np.asarray(v, dtype=float)
    if v.shape != (d * d,):
        raise ShapeError(f"expected a real vector of length {d * d}, got shape {v.shape}")
    rows, cols = np.triu_indices(d, 1)
    upper = v[d::2] + 1j * v[d + 1 :: 2]
    m = np.zeros((d, d), dtype=complex)
    m[np.arange(d), np.arange(d)] = v[:d]
    m[rows, cols] = upper
    m[cols, rows] = np.conj(upper)
    return m


def herm_coefficients(bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    """
    Complex coefficients ``c`` with ``bra^dagger M ket = c . herm_to_vec(M)``.

    ``bra`` and ``ket`` may be stacks of shape ``(p, d)``; the result then has
    shape ``(p, d*d)``.
    """
    bra = np.atleast_2d(bra)
    ket = np.atleast_2d(ket)
    d = bra.shape[1]
    w = np.conj(bra)[:, :, None] * ket[:, None, :]
    rows, cols = np.triu_indices(d, 1)
    out = np.empty((w.shape[0], d * d), dtype=complex)
    out[:, :d] = w[:, np.arange(d), np.arange(d)]
    out[:, d::2] = w[:, rows, cols] + w[:, cols, rows]
    out[:, d + 1 :: 2] = 1j * (w[:, rows, cols] - w[:, cols, rows])
    return out
