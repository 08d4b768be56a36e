"""Linear algebra over the local ring Z/p^e.

Every nonzero element is a unit times a power of p, so elimination with
a pivot of least valuation never needs division by a non-unit.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def valuation(a, p: int, e: int) -> np.ndarray:
    """p-adic valuation of entries of a (mod p^e); zero gets e."""
    a = np.asarray(a, dtype=np.int64) % p**e
    v = np.zeros(a.shape, dtype=np.int64)
    for t in range(1, e):
        v += (a % p**t == 0)
    v[a == 0] = e
    return v


@njit(cache=True)
def _val(a, p, e):
    if a == 0:
        return e
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@njit(cache=True)
def _inv_unit(u, q):
    # extended Euclid on (u, q)
    r0, r1 = q, u % q
    s0, s1 = 0, 1
    while r1 != 0:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    return s0 % q


@njit(cache=True)
def reduce_into(basis, has, row, p, e):
    """Insert ``row`` into an echelon generating set.

    ``basis[c]`` holds the row whose leading entry sits in column c,
    scaled so that entry is a power of p. The module spanned by the
    stored rows and every row inserted so far is preserved.
    Returns True if the stored set changed.
    """
    q = p**e
    n = row.shape[0]
    changed = False
    r = row.copy()
    for k in range(n):
        r[k] %= q
    c = 0
    while c < n:
        a = r[c]
        if a == 0:
            c += 1
            continue
        va = _val(a, p, e)
        if not has[c]:
            unit = a // p**va
            inv = _inv_unit(unit, q)
            for k in range(c, n):
                basis[c, k] = (r[k] * inv) % q
            has[c] = True
            return True
        vb = _val(basis[c, c], p, e)
        if va >= vb:
            m = a // p**vb
            for k in range(c, n):
                r[k] = (r[k] - m * basis[c, k]) % q
        else:
            # the new row has the smaller valuation: it becomes the pivot
            unit = a // p**va
            inv = _inv_unit(unit, q)
            old = basis[c].copy()
            for k in range(c, n):
                basis[c, k] = (r[k] * inv) % q
            m = old[c] // p**va
            for k in range(c, n):
                r[k] = (old[k] - m * basis[c, k]) % q
            changed = True
        c += 1
    return changed


def echelon(rows: np.ndarray, p: int, e: int, n: int | None = None):
    """Echelon generating set of the row module of ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[1] if n is None else n
    basis = np.zeros((n, n), dtype=np.int64)
    has = np.zeros(n, dtype=np.bool_)
    for r in rows:
        reduce_into(basis, has, r, p, e)
    return basis, has


def snf(A: np.ndarray, p: int, e: int):
    """Smith form of A over Z/p^e.

    Returns (vals, C, Cinv) with vals the diagonal valuations (length
    min(m, n); e marks a zero entry) and C an invertible column transform,
    so that A @ C is diagonal after invertible row operations.
    """
    q = p**e
    A = np.asarray(A, dtype=np.int64) % q
    m, n = A.shape
    C = np.eye(n, dtype=np.int64)
    Cinv = np.eye(n, dtype=np.int64)
    vals = []
    for t in range(min(m, n)):
        sub = A[t:, t:]
        if not sub.any():
            vals.extend([e] * (min(m, n) - t))
            break
        V = valuation(sub, p, e)
        i, j = np.unravel_index(np.argmin(V), V.shape)
        i += t
        j += t
        v = int(V.min())
        if i != t:
            A[[t, i]] = A[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            C[:, [t, j]] = C[:, [j, t]]
            Cinv[[t, j]] = Cinv[[j, t]]
        unit = int(A[t, t]) // p**v
        A[t] = A[t] * pow(unit, -1, q) % q
        pv = p**v
        # clear column t below and above with row operations
        col = A[:, t].copy()
        col[t] = 0
        if col.any():
            A -= np.outer(col // pv, A[t])
            A %= q
        # clear row t with column operations
        k = A[t].copy() // pv
        k[t] = 0
        if k.any():
            C -= np.outer(C[:, t], k)
            C %= q
            Cinv[t] += k @ Cinv
            Cinv %= q
            A[t] = 0
            A[t, t] = pv
        vals.append(v)
    while len(vals) < min(m, n):
        vals.append(e)
    return vals, C, Cinv


def kernel(A: np.ndarray, p: int, e: int):
    """Kernel of x -> A x over Z/p^e, as (generators, orders_exponents).

    The kernel is the direct sum of the cyclic groups generated by the
    returned columns, the k-th having order p^a_k.
    """
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    vals, C, Cinv = snf(A, p, e)
    gens = []
    expo = []
    for i in range(n):
        v = vals[i] if i < len(vals) else e
        a = v  # y_i ranges over p^(e - v) Z/p^e, a cyclic group of order p^v
        if a == 0:
            continue
        gens.append(C[:, i] * p ** (e - a) % p**e)
        expo.append(a)
    return np.array(gens, dtype=np.int64).reshape(len(gens), n), expo, C, Cinv, vals


def quotient_invariants(orders: list[int], relations: np.ndarray, p: int, e: int):
    """Invariants (as exponents) of (sum Z/p^a_i) / <relations>.

    Returns (exponents, generator matrix): column j of the matrix lists the
    coordinates of the j-th invariant generator.
    """
    m = len(orders)
    rows = [np.asarray(relations, dtype=np.int64).reshape(-1, m)]
    rows.append(np.diag([p**a for a in orders]).astype(np.int64))
    R = np.concatenate(rows, axis=0) % p**e
    vals, C, Cinv = snf(R, p, e)
    exps = []
    gens = []
    for j in range(m):
        v = vals[j] if j < len(vals) else e
        if v > 0:
            exps.append(v)
            # row vectors: coordinates z = x C, so z = e_j is x = row j of C^-1
            gens.append(Cinv[j])
    return exps, np.array(gens, dtype=np.int64).reshape(len(gens), m)
