"""Finite models of the universal marked central extension of (G', c).

The group is presented on symbols [g], g in c, subject to
[x][y][x]^-1 = [x y x^-1] and the truncation [g]^(2M) = 1.  Coset
enumeration over the trivial subgroup yields a table on which elements
are multiplied by tracing words, so groups of a few hundred thousand
elements stay cheap.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from pathlib import Path

import numpy as np
from numba import njit

from .abelian import AbelianInvariants
from .errors import CapExceeded, InvariantViolation, NotCoprime, NotOverC, ParityViolation
from .groups import FiniteGroup
from .todd_coxeter import coset_enumerate, trace
from .wreath import AdmissibleType

DEFAULT_COSET_CAP = 10**6


@dataclass(frozen=True)
class MarkedPresentation:
    """Generators are the elements of c by index in G'; relators are words
    of (generator, exponent) pairs."""

    gtype: AdmissibleType = field(repr=False)
    generators: tuple[int, ...]
    relations: tuple[tuple[tuple[int, int], ...], ...]
    M: int

    @property
    def conjugation_relations(self):
        k = len(self.generators)
        return self.relations[: k * k]

    @property
    def power_relations(self):
        k = len(self.generators)
        return self.relations[k * k :]


def build_presentation(T: AdmissibleType, M: int | None = None) -> MarkedPresentation:
    """The full presentation: |c|^2 conjugation relations, |c| power relations."""
    M = T.order if M is None else int(M)
    Gp = T.group
    c = [int(i) for i in T.index_of(T.c)]
    pos = {g: i for i, g in enumerate(c)}
    rels = []
    for i, x in enumerate(c):
        for j, y in enumerate(c):
            k = pos[Gp.conj(x, y)]
            rels.append(((i, 1), (j, 1), (i, -1), (k, -1)))
    for i in range(len(c)):
        rels.append(((i, 2 * M),))
    return MarkedPresentation(T, tuple(c), tuple(rels), M)


def _letters(word):
    out = []
    for g, e in word:
        col = 2 * g if e > 0 else 2 * g + 1
        out.extend([col] * abs(e))
    return out


def _invert(word):
    return [x ^ 1 for x in reversed(word)]


@njit(cache=True)
def _mul_many(table, ptab, pcol, us, vs):
    out = np.empty(us.shape[0], dtype=np.int64)
    path = np.empty(ptab.shape[0], dtype=np.int64)
    for k in range(us.shape[0]):
        v = vs[k]
        n = 0
        while v != 0:
            path[n] = pcol[v]
            n += 1
            v = ptab[v]
        u = us[k]
        for i in range(n - 1, -1, -1):
            u = table[u, path[i]]
        out[k] = u
    return out


@njit(cache=True)
def _inv_many(table, ptab, pcol, us):
    out = np.empty(us.shape[0], dtype=np.int64)
    for k in range(us.shape[0]):
        v = us[k]
        u = 0
        # u^-1 is the reversed, inverted word of u traced from the identity
        while v != 0:
            u = table[u, pcol[v] ^ 1]
            v = ptab[v]
        out[k] = u
    return out


@njit(cache=True)
def _bfs_tree(table):
    n, ncols = table.shape
    parent = np.full(n, -1, dtype=np.int64)
    pcol = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    parent[0] = 0
    order[0] = 0
    head, tail = 0, 1
    while head < tail:
        u = order[head]
        head += 1
        for x in range(ncols):
            v = table[u, x]
            if parent[v] < 0:
                parent[v] = u
                pcol[v] = x
                order[tail] = v
                tail += 1
    parent[0] = 0
    return parent, pcol, order


class MarkedUniversalGroup:
    """Coset-table model of the truncated marked extension.

    Elements are coset numbers 0..order-1 with 0 the identity.
    """

    def __init__(self, T: AdmissibleType, M: int, table: np.ndarray, gen_elems: list[int], words: dict[int, list[int]]):
        self.gtype = T
        self.M = M
        self.table = table
        self.order = int(table.shape[0])
        self.gen_elems = gen_elems  # G' indices of the enumeration generators
        self._words = words  # G' index of each element of c -> word in columns
        Gp = T.group
        self.Gp = Gp
        parent, pcol, order = _bfs_tree(table)
        self._parent, self._pcol = parent, pcol
        # images in G' and in the lattice (Z/2M)^r, propagated along the tree
        class_of = {}
        for k, cls in enumerate(T.c_classes):
            for code in cls:
                class_of[int(T.index_of(code))] = k
        self.class_of = class_of
        r = len(T.c_classes)
        self.r = r
        col_g = np.empty(table.shape[1], dtype=np.int64)
        col_l = np.zeros((table.shape[1], r), dtype=np.int64)
        for j, g in enumerate(gen_elems):
            col_g[2 * j] = g
            col_g[2 * j + 1] = Gp.inverse(g)
            col_l[2 * j, class_of[g]] = 1
            col_l[2 * j + 1, class_of[g]] = -1
        to_g = np.zeros(self.order, dtype=np.int64)
        lat = np.zeros((self.order, r), dtype=np.int64)
        for v in order[1:]:
            u, x = parent[v], pcol[v]
            to_g[v] = Gp.table[to_g[u], col_g[x]]
            lat[v] = (lat[u] + col_l[x]) % (2 * M)
        self.to_Gprime = to_g
        self.to_lattice = lat
        self._check_images(col_g, col_l)

    def _check_images(self, col_g, col_l):
        """The BFS images must respect every table edge (well-definedness)."""
        Gt = self.Gp.table
        for x in range(self.table.shape[1]):
            tgt = self.table[:, x]
            if not np.array_equal(self.to_Gprime[tgt], Gt[self.to_Gprime, col_g[x]]):
                raise InvariantViolation("map to G' is not well defined")
            if not np.array_equal(self.to_lattice[tgt], (self.to_lattice + col_l[x]) % (2 * self.M)):
                raise InvariantViolation("lattice map is not well defined")

    # arithmetic -----------------------------------------------------
    def mul(self, u, v):
        scalar = np.ndim(u) == 0 and np.ndim(v) == 0
        us, vs = np.broadcast_arrays(np.atleast_1d(np.asarray(u, dtype=np.int64)), np.atleast_1d(np.asarray(v, dtype=np.int64)))
        out = _mul_many(self.table, self._parent, self._pcol, np.ascontiguousarray(us), np.ascontiguousarray(vs))
        return int(out[0]) if scalar else out

    def inv(self, u):
        scalar = np.ndim(u) == 0
        out = _inv_many(self.table, self._parent, self._pcol, np.atleast_1d(np.asarray(u, dtype=np.int64)))
        return int(out[0]) if scalar else out

    def power(self, u, k: int):
        k = int(k)
        if k < 0:
            u, k = self.inv(u), -k
        acc, base = 0, int(u)
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def conj(self, g, u):
        """g u g^-1."""
        return self.mul(self.mul(g, u), self.inv(g))

    def element_order(self, u) -> int:
        k, v = 1, int(u)
        while v != 0:
            v = self.mul(v, u)
            k += 1
        return k

    # marked data ----------------------------------------------------
    @cached_property
    def lifts(self) -> dict[int, int]:
        """G' index of g in c -> the element [g]."""
        return {g: int(trace(self.table, 0, np.array(w, dtype=np.int64))) for g, w in self._words.items()}

    def lift(self, g: int) -> int:
        return self.lifts[int(g)]

    @cached_property
    def section(self) -> np.ndarray:
        """A fixed preimage in U of every element of G'."""
        Gp = self.Gp
        sec = np.full(Gp.n, -1, dtype=np.int64)
        sec[0] = 0
        q = deque([0])
        gens = [(g, self.lift(g)) for g in self.gen_elems]
        while q:
            x = q.popleft()
            for g, lg in gens:
                y = Gp.mul(x, g)
                if sec[y] < 0:
                    sec[y] = self.mul(int(sec[x]), lg)
                    q.append(y)
        return sec

    @cached_property
    def kernel(self) -> np.ndarray:
        mask = (self.to_Gprime == 0) & ~self.to_lattice.any(axis=1)
        return np.flatnonzero(mask)

    @cached_property
    def kernel_invariants(self) -> AbelianInvariants:
        return AbelianInvariants.from_element_orders([self.element_order(k) for k in self.kernel])

    def kernel_is_central(self) -> bool:
        k = self.kernel
        for j in range(len(self.gen_elems)):
            s = self.table[:, 2 * j]
            if not np.array_equal(self.mul(k, s[0]), s[k]):
                return False
        return True

    def predicted_order(self, h2_order: int) -> int:
        ab = self.Gp.abelianization.invariants.order
        return self.Gp.n * h2_order * (2 * self.M) ** self.r // ab

    @cached_property
    def exponent(self) -> int:
        """A multiple of the exponent: lcm of orders of the tree generators is
        not enough in general, so the group order is used."""
        return self.order

    def as_finite_group(self) -> FiniteGroup:
        els = np.arange(self.order)
        table = np.stack([self.mul(els, np.full(self.order, v)) for v in els], axis=1)
        return FiniteGroup(table, name="Ubar")

    # z-map, action, and fixed points ---------------------------------
    def z_map(self, u: int) -> int:
        """Conjugate u into the fibre over its class representative (or leave
        it alone over the identity), checking the result is unique."""
        u = int(u)
        g = int(self.to_Gprime[u])
        if g == 0:
            return u
        if g not in self.class_of:
            raise NotOverC("element does not lie over c or the identity")
        Gp = self.Gp
        rep = int(self.gtype.index_of(self.gtype.class_reps[self.class_of[g]]))
        conj = np.flatnonzero(Gp.table[Gp.table[:, g], Gp.inv] == rep)
        x = int(conj[0])
        z = self.conj(int(self.section[x]), u)
        for y in Gp.centralizer(rep).elements[:]:
            if self.conj(int(self.section[y]), z) != z:
                raise InvariantViolation("conjugates over the representative are not unique")
        return z

    def discrete_action(self, alpha: int, x: "MarkedElement") -> "MarkedElement":
        alpha = int(alpha)
        if gcd(alpha, self.Gp.n) != 1:
            raise NotCoprime(f"{alpha} is not coprime to |G'| = {self.Gp.n}")
        u = self.power(x.u, alpha)
        for i, rep in enumerate(self.gtype.class_reps):
            e = (1 - alpha) * int(x.nbar[i])
            if e:
                u = self.mul(u, self.power(self.lift(int(self.gtype.index_of(rep))), e % self.order))
        return MarkedElement(u, tuple(x.nbar))

    def marked(self, u: int, nbar) -> "MarkedElement":
        nbar = tuple(int(v) for v in nbar)
        if any((a - b) % (2 * self.M) for a, b in zip(self.to_lattice[u], nbar)):
            raise ValueError("lattice image does not match nbar")
        return MarkedElement(int(u), nbar)

    def reference_preimage(self, y: int, nbar) -> int:
        """lift(y) times lift(g_i)^(n_i - delta_ik), lying over y with lattice nbar."""
        reps = [int(self.gtype.index_of(r)) for r in self.gtype.class_reps]
        k = self.class_of.get(int(y)) if y != 0 else None
        u = self.lift(y) if y != 0 else 0
        for i, g in enumerate(reps):
            e = int(nbar[i]) - (1 if i == k else 0)
            u = self.mul(u, self.power(self.lift(g), e % self.order))
        return u

    def prop_pb_count(self, q: int, y: int, nbar) -> tuple[int, int]:
        """Brute-force count of q^-1-fixed kernel translates, and |kernel[q-1]|."""
        q = int(q)
        if gcd(q, self.Gp.n) != 1:
            raise NotCoprime(f"{q} is not coprime to |G'| = {self.Gp.n}")
        nbar = [int(v) for v in nbar]
        k = self.class_of.get(int(y)) if y != 0 else None
        if y != 0 and k is None:
            raise NotOverC("y must lie in c or be the identity")
        for i, n in enumerate(nbar):
            want_odd = i == k
            if (n % 2 == 1) != want_odd:
                raise ParityViolation("n_k must be odd for y in c_k and every other n_i even")
        ref = self.reference_preimage(y, nbar)
        alpha = pow(q, -1, self.exponent)
        fixed = 0
        for z in self.kernel:
            u = self.mul(ref, int(z))
            x = self.marked(u, nbar)
            if self.discrete_action(alpha, x).u == u:
                fixed += 1
        return fixed, self.kernel_invariants.torsion_size(q - 1)


@dataclass(frozen=True)
class MarkedElement:
    u: int
    nbar: tuple[int, ...]


def reduced_presentation(T: AdmissibleType, M: int | None = None):
    """Equivalent presentation on a generating subset S of c.

    Every [y] is rewritten as a conjugate of a generator along a BFS tree;
    the relations [s][y][s]^-1 = [s y s^-1] for s in S then imply all the
    others, and only class representatives need the power relation.
    Returns (generator G' indices, relator column words, words for all of c).
    """
    M = T.order if M is None else int(M)
    Gp = T.group
    reps = [int(T.index_of(r)) for r in T.class_reps]
    c = [int(i) for i in T.index_of(T.c)]
    gens = list(reps)
    cur = Gp.closure(gens).order
    for g in c:
        if cur == Gp.n:
            break
        size = Gp.closure(gens + [g]).order
        if size > cur:
            gens.append(g)
            cur = size
    gpos = {g: j for j, g in enumerate(gens)}
    words: dict[int, list[int]] = {g: [2 * gpos[g]] for g in gens}
    q = deque(gens)
    while q:
        y = q.popleft()
        for s in gens:
            z = Gp.conj(s, y)
            if z not in words:
                words[z] = [2 * gpos[s]] + words[y] + [2 * gpos[s] + 1]
                q.append(z)
    if len(words) != len(c):
        raise InvariantViolation("conjugation by the generators does not reach all of c")
    rels = []
    for s in gens:
        ws = [2 * gpos[s]]
        for y in c:
            z = Gp.conj(s, y)
            rels.append(ws + words[y] + _invert(ws) + _invert(words[z]))
    for g in reps:
        rels.append([2 * gpos[g]] * (2 * M))
    return gens, rels, words


def todd_coxeter(P_or_T, M: int | None = None, cap: int = DEFAULT_COSET_CAP, reduced: bool = True,
                 cache_dir: str | None = None) -> MarkedUniversalGroup:
    """Enumerate the marked group.  Accepts a MarkedPresentation or an
    AdmissibleType; ``reduced=False`` enumerates the full presentation.
    Coset tables are memoized under ``cache_dir`` (default: $NACL_CACHE_DIR)."""
    if isinstance(P_or_T, MarkedPresentation):
        T, M = P_or_T.gtype, P_or_T.M
    else:
        T = P_or_T
        M = T.order if M is None else int(M)
    if reduced:
        gens, rels, words = reduced_presentation(T, M)
    else:
        P = build_presentation(T, M)
        gens = list(P.generators)
        rels = [_letters(r) for r in P.relations]
        words = {g: [2 * j] for j, g in enumerate(gens)}
    table = _cached_enumerate(len(gens), rels, cap, cache_dir)
    return MarkedUniversalGroup(T, M, table, gens, words)


def presentation_key(ngens: int, rels) -> str:
    """Canonical hash of a presentation given as column words."""
    h = hashlib.sha256()
    h.update(json.dumps([int(ngens), [[int(x) for x in r] for r in rels]]).encode())
    return h.hexdigest()


def _cached_enumerate(ngens: int, rels, cap: int, cache_dir) -> np.ndarray:
    if cache_dir is None:
        cache_dir = os.environ.get("NACL_CACHE_DIR")
    if not cache_dir:
        return coset_enumerate(ngens, rels, cap=cap)
    path = Path(cache_dir) / f"cosets-{presentation_key(ngens, rels)}.npy"
    if path.exists():
        table = np.load(path)
        # a cache hit must not bypass the cap
        if table.shape[0] > cap:
            raise CapExceeded(f"coset table has {table.shape[0]} rows, above cap {cap}")
        return table
    table = coset_enumerate(ngens, rels, cap=cap)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npy")
    np.save(tmp, table)
    os.replace(tmp, path)
    return table
