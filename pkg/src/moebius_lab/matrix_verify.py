"""Dense divisibility matrices and the exact identities linking them to mu.

All matrices are the leading n x n blocks of the infinite ones, stored as
numpy int64 arrays with 0-based storage: entry (i, j) of the math sits at
``[i - 1, j - 1]``.
"""

from __future__ import annotations

import numpy as np

from .core_mu import MuTable
from .errors import InvalidArgument

DENSE_BOUND = 512

# Bareiss products of two entries below this stay inside int64.
_INT64_SAFE = 1 << 31


def _check_dim(n: int, bound: int = DENSE_BOUND) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"dimension must be a positive integer, got {n!r}")
    if n > bound:
        raise InvalidArgument(f"dimension {n} exceeds dense-matrix bound {bound}")
    return int(n)


def _divides(n: int) -> np.ndarray:
    idx = np.arange(1, n + 1)
    return idx[None, :] % idx[:, None] == 0


def build_U(n: int, bound: int = DENSE_BOUND) -> np.ndarray:
    """u_ij = 1 iff i | j."""
    n = _check_dim(n, bound)
    return _divides(n).astype(np.int64)


def build_S(n: int, bound: int = DENSE_BOUND) -> np.ndarray:
    """s_ij = 1 iff j = 1 and i != 1."""
    n = _check_dim(n, bound)
    s = np.zeros((n, n), dtype=np.int64)
    s[1:, 0] = 1
    return s


def build_V(n: int, mu: MuTable, bound: int = DENSE_BOUND) -> np.ndarray:
    """v_ij = mu(j / i) when i | j, else 0."""
    n = _check_dim(n, bound)
    if mu.n_max < n:
        raise InvalidArgument(f"mu table holds {mu.n_max} values, need {n}")
    idx = np.arange(1, n + 1)
    div = _divides(n)
    quotient = np.where(div, idx[None, :] // idx[:, None], 0)
    return np.where(div, mu.values[quotient].astype(np.int64), 0)


def build_redheffer(n: int, bound: int = DENSE_BOUND) -> np.ndarray:
    """r_ij = 1 iff j = 1 or i | j."""
    r = build_U(n, bound)
    r[:, 0] = 1
    return r


def redheffer_decomposes(n: int) -> bool:
    """R == S + U entrywise."""
    return bool(np.array_equal(build_redheffer(n), build_S(n) + build_U(n)))


def verify_inverse(n: int, mu: MuTable) -> bool:
    """True iff U V = V U = I (and hence V^T U^T = I) exactly."""
    u = build_U(n)
    v = build_V(n, mu)
    eye = np.eye(u.shape[0], dtype=np.int64)
    return bool(
        np.array_equal(u @ v, eye)
        and np.array_equal(v @ u, eye)
        and np.array_equal(v.T @ u.T, eye)
    )


def first_row_from_U(u: np.ndarray) -> list[int]:
    """Solve the first row of U^{-1} column by column.

    v_11 = 1 and v_1i = -sum_{k<i} v_1k u_ki; for the divisibility matrix
    this is the mu recursion written in matrix form.
    """
    n = u.shape[0]
    row = [1] + [0] * (n - 1)
    for i in range(1, n):
        row[i] = -sum(row[k] * int(u[k, i]) for k in range(i))
    return row


def _bareiss_object(a: np.ndarray, k0: int, prev, sign: int):
    """Continue Bareiss elimination at pivot k0 with Python integers."""
    a = a.astype(object)
    n = a.shape[0]
    for k in range(k0, n - 1):
        if a[k, k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r, k] != 0), None)
            if swap is None:
                return 0
            a[[k, swap]] = a[[swap, k]]
            sign = -sign
        piv = a[k, k]
        a[k + 1 :, k + 1 :] = (a[k + 1 :, k + 1 :] * piv - np.outer(a[k + 1 :, k], a[k, k + 1 :])) // prev
        a[k + 1 :, k] = 0
        prev = piv
    return sign * int(a[n - 1, n - 1])


def bareiss_det(m: np.ndarray) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination.

    Runs in int64 while every entry is small enough that the update cannot
    overflow, and switches to arbitrary precision as soon as it could.
    """
    a = np.array(m, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidArgument(f"need a square matrix, got shape {a.shape}")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k, k] == 0:
            nz = np.flatnonzero(a[k + 1 :, k])
            if nz.size == 0:
                return 0
            swap = k + 1 + int(nz[0])
            a[[k, swap]] = a[[swap, k]]
            sign = -sign
        if np.abs(a[k:, k:]).max() >= _INT64_SAFE:
            return _bareiss_object(a, k, prev, sign)
        piv = a[k, k]
        sub = a[k + 1 :, k + 1 :] * piv - np.outer(a[k + 1 :, k], a[k, k + 1 :])
        # exact: Bareiss guarantees divisibility by the previous pivot
        a[k + 1 :, k + 1 :] = sub // prev
        a[k + 1 :, k] = 0
        prev = piv
    return sign * int(a[n - 1, n - 1])


def redheffer_determinant(n: int) -> int:
    """det(R_n), which equals the Mertens function M(n)."""
    return bareiss_det(build_redheffer(n))
