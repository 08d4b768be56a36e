"""Second cohomology with coefficients Z/p^e from normalized 2-cocycles.

A normalized 2-cocycle f is pinned down by its values u(g, s) = f(g, s)
on a generating set S: the cocycle identity
    f(x, y s) = f(x, y) + f(x y, s) - f(y, s)
propagates f(x, .) along a spanning tree of the Cayley graph, and an
arbitrary u extends to a cocycle exactly when the propagation agrees on
every non-tree edge (induct on word length in the last argument).  So
Z^2 is cut out of (Z/p^e)^(|G| |S|) by sparse linear conditions, which
are fed one at a time into an echelon generating set.

The full bar-resolution maps are kept as well, for small-group checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from sympy import factorint

from .abelian import AbelianInvariants
from .errors import CapExceeded, NotCommuting, SubtractionMismatch
from .groups import FiniteGroup
from .localring import kernel, quotient_invariants, reduce_into

DEFAULT_COCYCLE_CAP = 200


# bar resolution, explicit ---------------------------------------------

@dataclass
class CochainComplexSlice:
    """Normalized-free bar cochains C^1 -> C^2 -> C^3 over Z/p^e.

    Cochains are indexed by tuples of group elements in row-major order.
    """

    group: FiniteGroup
    p: int
    e: int

    @property
    def modulus(self) -> int:
        return self.p**self.e

    @cached_property
    def d1(self) -> csr_matrix:
        """(d1 h)(x, y) = h(x) + h(y) - h(xy)."""
        G = self.group
        n = G.n
        x, y = np.divmod(np.arange(n * n), n)
        xy = G.table[x, y].astype(np.int64)
        rows = np.concatenate([np.arange(n * n)] * 3)
        cols = np.concatenate([x, y, xy])
        vals = np.concatenate([np.ones(n * n), np.ones(n * n), -np.ones(n * n)])
        return csr_matrix((vals, (rows, cols)), shape=(n * n, n)).astype(np.int64)

    def d2_rows(self, start: int, stop: int) -> csr_matrix:
        """Rows start..stop-1 of d2:
        (d2 f)(x, y, z) = f(y, z) - f(xy, z) + f(x, yz) - f(x, y)."""
        G = self.group
        n = G.n
        idx = np.arange(start, stop)
        x, rest = np.divmod(idx, n * n)
        y, z = np.divmod(rest, n)
        t = G.table.astype(np.int64)
        cols = np.stack([y * n + z, t[x, y] * n + z, x * n + t[y, z], x * n + y], axis=1)
        vals = np.tile(np.array([1, -1, 1, -1]), (idx.size, 1))
        rows = np.repeat(np.arange(idx.size), 4)
        out = csr_matrix((vals.ravel(), (rows, cols.ravel())), shape=(idx.size, n * n)).astype(np.int64)
        out.eliminate_zeros()  # coinciding terms can cancel
        return out

    @cached_property
    def d2(self) -> csr_matrix:
        n = self.group.n
        return self.d2_rows(0, n**3)

    def is_cocycle(self, f: np.ndarray) -> bool:
        f = np.asarray(f, dtype=np.int64).reshape(-1)
        n = self.group.n
        step = max(1, 2**20 // (n * n))
        for start in range(0, n**3, step * n * n):
            rows = self.d2_rows(start, min(n**3, start + step * n * n))
            if np.any((rows @ f) % self.modulus):
                return False
        return True


def commutator_pairing(G: FiniteGroup, f: np.ndarray, x: int, y: int, modulus: int) -> int:
    """f(x, y) - f(y, x) for commuting x and y."""
    if G.mul(x, y) != G.mul(y, x):
        raise NotCommuting(f"{x} and {y} do not commute")
    f = np.asarray(f).reshape(G.n, G.n)
    return int((f[x, y] - f[y, x]) % modulus)


# generator-parametrized cocycles --------------------------------------

class _Tree:
    """BFS spanning tree of the Cayley graph for right multiplication."""

    def __init__(self, G: FiniteGroup, gens: list[int]):
        n = G.n
        parent = np.full(n, -1, dtype=np.int64)
        pgen = np.full(n, -1, dtype=np.int64)
        parent[0] = 0
        order = [0]
        head = 0
        while head < len(order):
            w = order[head]
            head += 1
            for j, s in enumerate(gens):
                v = G.mul(w, s)
                if parent[v] < 0:
                    parent[v], pgen[v] = w, j
                    order.append(v)
        self.parent, self.pgen = parent, pgen
        self.order = np.array(order, dtype=np.int64)
        # path from the identity to w as (y_i, j_i) edges
        starts = np.zeros(n + 1, dtype=np.int64)
        paths: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for w in order[1:]:
            paths[w] = paths[parent[w]] + [(int(parent[w]), int(pgen[w]))]
        starts[1:] = np.cumsum([len(p) for p in paths])
        self.path_start = starts
        self.path_y = np.array([y for p in paths for y, _ in p], dtype=np.int64)
        self.path_j = np.array([j for p in paths for _, j in p], dtype=np.int64)
        # non-tree edges (y, j)
        ne = []
        for y in range(n):
            for j, s in enumerate(gens):
                v = G.mul(y, s)
                if not (parent[v] == y and pgen[v] == j and v != 0):
                    ne.append((y, j))
        self.nontree = np.array(ne, dtype=np.int64).reshape(-1, 2)


@njit(cache=True)
def _add_path(row, table, x, w, ps, py, pj, k, sign, q):
    """row += sign * L(x, w) where f(x, w) = sum over path edges
    u(x y_i, j_i) - u(y_i, j_i)."""
    for t in range(ps[w], ps[w + 1]):
        y = py[t]
        j = pj[t]
        a = table[x, y] * k + j
        b = y * k + j
        row[a] = (row[a] + sign) % q
        row[b] = (row[b] - sign) % q


@njit(cache=True)
def _cocycle_conditions(table, gens, nontree, ps, py, pj, basis, has, p, e):
    n = table.shape[0]
    k = gens.shape[0]
    q = p**e
    nv = n * k
    row = np.zeros(nv, dtype=np.int64)
    # normalization u(1, s) = 0
    for j in range(k):
        row[:] = 0
        row[j] = 1
        reduce_into(basis, has, row, p, e)
    for t in range(nontree.shape[0]):
        y = nontree[t, 0]
        j = nontree[t, 1]
        w = table[y, gens[j]]
        for x in range(n):
            row[:] = 0
            _add_path(row, table, x, y, ps, py, pj, k, 1, q)
            a = table[x, y] * k + j
            b = y * k + j
            row[a] = (row[a] + 1) % q
            row[b] = (row[b] - 1) % q
            _add_path(row, table, x, w, ps, py, pj, k, -1, q)
            reduce_into(basis, has, row, p, e)


@njit(cache=True)
def _pairing_conditions(table, k, pairs, ps, py, pj, basis, has, p, e):
    n = table.shape[0]
    q = p**e
    row = np.zeros(n * k, dtype=np.int64)
    for t in range(pairs.shape[0]):
        x = pairs[t, 0]
        y = pairs[t, 1]
        row[:] = 0
        _add_path(row, table, x, y, ps, py, pj, k, 1, q)
        _add_path(row, table, y, x, ps, py, pj, k, -1, q)
        reduce_into(basis, has, row, p, e)


@dataclass
class CohomologySlice:
    """H^2(G, Z/p^e) (or a subgroup cut out by pairing conditions)."""

    group: FiniteGroup
    p: int
    e: int
    invariants: AbelianInvariants
    representatives: list[np.ndarray]  # explicit cocycles f, shape (n, n)


class CocycleSpace:
    def __init__(self, G: FiniteGroup, p: int, e: int, cap: int = DEFAULT_COCYCLE_CAP):
        if G.n > cap:
            raise CapExceeded(f"|G| = {G.n} exceeds cocycle cap {cap}")
        self.G, self.p, self.e = G, p, e
        self.q = p**e
        self.gens = [int(g) for g in G.minimal_generators]
        self.k = len(self.gens)
        self.tree = _Tree(G, self.gens)
        self.table = G.table.astype(np.int64)
        nv = G.n * max(self.k, 1)
        self.basis = np.zeros((nv, nv), dtype=np.int64)
        self.has = np.zeros(nv, dtype=np.bool_)
        if self.k:
            tr = self.tree
            _cocycle_conditions(self.table, np.array(self.gens, dtype=np.int64), tr.nontree,
                                tr.path_start, tr.path_y, tr.path_j, self.basis, self.has, p, e)

    @property
    def nvars(self) -> int:
        return self.G.n * self.k

    def add_pairing_conditions(self, pairs) -> None:
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if self.k and pairs.size:
            tr = self.tree
            _pairing_conditions(self.table, self.k, pairs, tr.path_start, tr.path_y, tr.path_j,
                                self.basis, self.has, self.p, self.e)

    def coboundaries(self) -> np.ndarray:
        """Generators of B^2 in u-coordinates: u(g, s) = h(g) + h(s) - h(gs)."""
        n, k = self.G.n, self.k
        out = np.zeros((n - 1, n * k), dtype=np.int64)
        g = np.arange(n)
        for j, s in enumerate(self.gens):
            gs = self.table[:, s]
            for hk in range(1, n):
                col = (g == hk).astype(np.int64) + (s == hk) - (gs == hk)
                out[hk - 1, g * k + j] += col
        return out % self.q

    def to_cocycle(self, u: np.ndarray) -> np.ndarray:
        """Expand u into the full table f(x, w)."""
        n, k = self.G.n, self.k
        f = np.zeros((n, n), dtype=np.int64)
        tr = self.tree
        u = np.asarray(u, dtype=np.int64)
        x = np.arange(n)
        for w in tr.order[1:]:
            y, j = tr.parent[w], tr.pgen[w]
            f[:, w] = f[:, y] + u[self.table[x, y] * k + j] - u[y * k + j]
        return f % self.q

    def cohomology(self) -> CohomologySlice:
        if self.k == 0:
            return CohomologySlice(self.G, self.p, self.e, AbelianInvariants(), [])
        A = self.basis[self.has]
        gens, expo, C, Cinv, vals = kernel(A, self.p, self.e)
        # coordinates of coboundaries in the kernel basis y = C^-1 u
        B = self.coboundaries()
        Y = (B @ Cinv.T) % self.q
        keep = [i for i in range(self.nvars) if (vals[i] if i < len(vals) else self.e) > 0]
        orders = [vals[i] if i < len(vals) else self.e for i in keep]
        T = np.zeros((B.shape[0], len(keep)), dtype=np.int64)
        for col, i in enumerate(keep):
            step = self.p ** (self.e - orders[col])
            if np.any(Y[:, i] % step):
                raise AssertionError("coboundary outside the cocycle module")
            T[:, col] = (Y[:, i] // step) % (self.p ** orders[col])
        exps, gmat = quotient_invariants(orders, T, self.p, self.e)
        reps = []
        for coeffs in gmat:
            y = np.zeros(self.nvars, dtype=np.int64)
            for col, i in enumerate(keep):
                y[i] = coeffs[col] * self.p ** (self.e - orders[col])
            u = (C @ y) % self.q
            reps.append(self.to_cocycle(u))
        inv = AbelianInvariants(tuple(self.p**a for a in exps))
        return CohomologySlice(self.G, self.p, self.e, inv, reps)


def h2_classes(G: FiniteGroup, p: int, e: int, cap: int = DEFAULT_COCYCLE_CAP) -> CohomologySlice:
    return CocycleSpace(G, p, e, cap).cohomology()


def commuting_pairs(G: FiniteGroup, c) -> np.ndarray:
    out = []
    for x in c:
        for y in G.centralizer(int(x)).elements:
            out.append((int(x), int(y)))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def c_symmetric_subgroup(G: FiniteGroup, c, p: int, e: int, cap: int = DEFAULT_COCYCLE_CAP) -> CohomologySlice:
    space = CocycleSpace(G, p, e, cap)
    space.add_pairing_conditions(commuting_pairs(G, c))
    return space.cohomology()


def ext_factors(H1: AbelianInvariants, p: int, e: int) -> AbelianInvariants:
    """Ext(H1, Z/p^e) = sum over cyclic factors Z/a of Z/p^min(v_p(a), e)."""
    out = []
    for f in H1.prime_power_factors:
        if f % p == 0:
            v = factorint(f)[p]
            out.append(p ** min(v, e))
    return AbelianInvariants(tuple(out))


def reduced_schur(G: FiniteGroup, c, cap: int = DEFAULT_COCYCLE_CAP, extra_e: int = 0) -> AbelianInvariants:
    """H_2(G, c) assembled prime by prime from the c-symmetric subgroup."""
    H1 = G.abelianization.invariants
    out = AbelianInvariants()
    for p, v in sorted(factorint(G.n).items()):
        e = v + extra_e
        S = c_symmetric_subgroup(G, c, p, e, cap).invariants
        try:
            out = out + S.subtract(ext_factors(H1, p, e))
        except ValueError as exc:
            raise SubtractionMismatch(str(exc)) from exc
    return out


def schur_multiplier(G: FiniteGroup, cap: int = DEFAULT_COCYCLE_CAP, extra_e: int = 0) -> AbelianInvariants:
    return reduced_schur(G, [], cap, extra_e)
