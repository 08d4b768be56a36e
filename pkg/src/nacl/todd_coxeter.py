"""HLT coset enumeration with lookahead, compiled with numba.

Words are sequences of column indices: generator j is column 2j and its
inverse is column 2j+1, so the inverse of column x is x ^ 1.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import CapExceeded, IncompleteEnumeration

# status codes returned by the compiled kernel
_OK = 0
_FULL = 1


@njit(cache=True)
def _rep(p, k):
    r = k
    while p[r] != r:
        r = p[r]
    while p[k] != r:
        nxt = p[k]
        p[k] = r
        k = nxt
    return r


@njit(cache=True)
def _merge(p, queue, qlen, k, l):
    a = _rep(p, k)
    b = _rep(p, l)
    if a == b:
        return qlen
    if a > b:
        a, b = b, a
    p[b] = a
    queue[qlen] = b
    return qlen + 1


@njit(cache=True)
def _coincidence(table, p, queue, a, b, ncols):
    qlen = _merge(p, queue, 0, a, b)
    i = 0
    dead = 0
    while i < qlen:
        g = queue[i]
        i += 1
        dead += 1
        for x in range(ncols):
            d = table[g, x]
            if d >= 0:
                xi = x ^ 1
                table[d, xi] = -1
                mu = _rep(p, g)
                nu = _rep(p, d)
                if table[mu, x] >= 0:
                    qlen = _merge(p, queue, qlen, nu, table[mu, x])
                elif table[nu, xi] >= 0:
                    qlen = _merge(p, queue, qlen, mu, table[nu, xi])
                else:
                    table[mu, x] = nu
                    table[nu, xi] = mu
    return dead


@njit(cache=True)
def _scan(table, p, queue, c, rel, start, end, ncols, fill, nxt, cap):
    """Scan relator rel[start:end] at coset c.

    Returns (status, nxt, dead). With fill, undefined entries are defined
    (HLT); without, only deductions and coincidences are made (lookahead).
    """
    dead = 0
    f = c
    b = c
    i = start
    j = end - 1
    while True:
        while i <= j and table[f, rel[i]] >= 0:
            f = table[f, rel[i]]
            i += 1
        if i > j:
            if f != b:
                dead += _coincidence(table, p, queue, f, b, ncols)
            return _OK, nxt, dead
        while j >= i and table[b, rel[j] ^ 1] >= 0:
            b = table[b, rel[j] ^ 1]
            j -= 1
        if j < i:
            dead += _coincidence(table, p, queue, f, b, ncols)
            return _OK, nxt, dead
        if i == j:
            table[f, rel[i]] = b
            table[b, rel[i] ^ 1] = f
            return _OK, nxt, dead
        if not fill:
            return _OK, nxt, dead
        if nxt >= cap:
            return _FULL, nxt, dead
        d = nxt
        nxt += 1
        p[d] = d
        for x in range(ncols):
            table[d, x] = -1
        table[f, rel[i]] = d
        table[d, rel[i] ^ 1] = f


@njit(cache=True)
def _compact(table, p, nxt, ncols, c):
    """Renumber live cosets to 0..L-1; returns (L, new index of c)."""
    newidx = np.full(nxt, -1, dtype=np.int64)
    L = 0
    for k in range(nxt):
        if p[k] == k:
            newidx[k] = L
            L += 1
    newc = 0
    for k in range(c):
        if p[k] == k:
            newc += 1
    for k in range(nxt):
        if p[k] == k:
            nk = newidx[k]
            for x in range(ncols):
                t = table[k, x]
                table[nk, x] = newidx[t] if t >= 0 else -1
    for k in range(L):
        p[k] = k
    return L, newc


@njit(cache=True)
def _hlt(ncols, rel, offs, cap):
    nrel = offs.shape[0] - 1
    table = np.full((cap, ncols), -1, dtype=np.int64)
    p = np.arange(cap).astype(np.int64)
    queue = np.empty(cap, dtype=np.int64)
    nxt = 1
    c = 0
    while c < nxt:
        if p[c] == c:
            r = 0
            while r < nrel:
                status, nxt2, dead = _scan(table, p, queue, c, rel, offs[r], offs[r + 1], ncols, True, nxt, cap)
                nxt = nxt2
                if status == _FULL:
                    # lookahead: deduce without defining, then compact
                    for d in range(nxt):
                        if p[d] != d:
                            continue
                        for rr in range(nrel):
                            if p[d] != d:
                                break
                            _scan(table, p, queue, d, rel, offs[rr], offs[rr + 1], ncols, False, nxt, cap)
                    nxt, c = _compact(table, p, nxt, ncols, c)
                    if nxt >= cap:
                        return table, nxt, _FULL
                    # coset c may have died during lookahead; restart its scan
                    r = 0
                    if c >= nxt:
                        break
                    continue
                if p[c] != c:
                    break
                r += 1
            if c < nxt and p[c] == c:
                for x in range(ncols):
                    if table[c, x] < 0:
                        if nxt >= cap:
                            return table, nxt, _FULL
                        d = nxt
                        nxt += 1
                        p[d] = d
                        for y in range(ncols):
                            table[d, y] = -1
                        table[c, x] = d
                        table[d, x ^ 1] = c
        c += 1
    n, c = _compact(table, p, nxt, ncols, nxt)
    return table, n, _OK


def _reduce(word):
    out = []
    for x in word:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    # cyclic reduction
    while len(out) >= 2 and out[0] == out[-1] ^ 1:
        out = out[1:-1]
    return out


def coset_enumerate(ngens: int, relators, cap: int = 10**6, start_cap: int | None = None) -> np.ndarray:
    """Coset table of the trivial subgroup; rows are cosets, coset 0 the identity.

    The table starts at ``start_cap`` rows and doubles, up to ``cap``
    rows, whenever lookahead cannot free space.
    """
    rels = [_reduce(list(r)) for r in relators]
    rels = [r for r in rels if r]
    rels.sort(key=len)
    flat = np.array([x for r in rels for x in r], dtype=np.int64)
    offs = np.zeros(len(rels) + 1, dtype=np.int64)
    offs[1:] = np.cumsum([len(r) for r in rels])
    ncols = 2 * ngens
    size = min(cap, start_cap or 4096)
    while True:
        table, n, status = _hlt(ncols, flat, offs, size)
        if status == _OK:
            break
        if size >= cap:
            raise CapExceeded(f"coset enumeration needs more than {cap} rows")
        size = min(cap, size * 2)
    table = table[:n].copy()
    if (table < 0).any():
        raise IncompleteEnumeration("coset table has undefined entries")
    return table


@njit(cache=True)
def trace(table, start, word):
    c = start
    for x in word:
        c = table[c, x]
    return c
