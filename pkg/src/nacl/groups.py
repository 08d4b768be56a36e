"""Finite groups stored as dense Cayley tables.

Elements are the integers 0..n-1 with 0 the identity. Products are read
straight from the table, so every operation here is a numpy gather.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .abelian import AbelianInvariants
from .errors import CapExceeded, InvalidPermutation

DEFAULT_CAP = 20000


def _table_dtype(n: int):
    return np.uint16 if n < 2**16 else np.int32


class FiniteGroup:
    """An immutable finite group given by its multiplication table.

    ``labels`` optionally carries a concrete realisation of each element
    (a permutation image tuple, a wreath code, ...) for printing and
    parsing; the group structure never consults it.
    """

    def __init__(self, table: np.ndarray, labels: Sequence | None = None, name: str = ""):
        table = np.asarray(table)
        n = table.shape[0]
        if table.shape != (n, n):
            raise ValueError("Cayley table must be square")
        if n == 0 or not np.array_equal(table[0], np.arange(n)) or not np.array_equal(table[:, 0], np.arange(n)):
            raise ValueError("element 0 must be the identity")
        self.table = table.astype(_table_dtype(n), copy=False)
        self.table.setflags(write=False)
        self.n = n
        self.labels = list(labels) if labels is not None else None
        self.name = name
        inv = np.argmin(self.table, axis=1)  # the identity is the smallest entry
        self.inv = inv.astype(np.int64)
        self.inv.setflags(write=False)

    # basic arithmetic -------------------------------------------------
    @property
    def order(self) -> int:
        return self.n

    def __len__(self) -> int:
        return self.n

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def inverse(self, x: int) -> int:
        return int(self.inv[x])

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return int(self.table[self.table[g, x], self.inv[g]])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inverse(x), -k
        acc, base = 0, x
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def commutator(self, x: int, y: int) -> int:
        """x y x^-1 y^-1."""
        t = self.table
        return int(t[t[t[x, y], self.inv[x]], self.inv[y]])

    def word(self, letters: Iterable[int]) -> int:
        acc = 0
        for a in letters:
            acc = self.mul(acc, a)
        return acc

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.n
        orders = np.ones(n, dtype=np.int64)
        cur = np.arange(n)
        alive = cur != 0
        k = 1
        while alive.any():
            cur = self.table[cur, np.arange(n)].astype(np.int64)
            k += 1
            done = alive & (cur == 0)
            orders[done] = k
            alive &= ~done
        orders[0] = 1
        orders.setflags(write=False)
        return orders

    def element_order(self, x: int) -> int:
        return int(self.element_orders[x])

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def conjugates(self, x: int) -> np.ndarray:
        """All g x g^-1 as g ranges over G (with repetition)."""
        return self.table[self.table[:, x], self.inv].astype(np.int64)

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        """Classes ordered by their least element, members sorted."""
        seen = np.zeros(self.n, dtype=bool)
        out = []
        for x in range(self.n):
            if seen[x]:
                continue
            cls = np.unique(self.conjugates(x))
            seen[cls] = True
            out.append(cls)
        return out

    @cached_property
    def class_index(self) -> np.ndarray:
        idx = np.empty(self.n, dtype=np.int64)
        for i, cls in enumerate(self.conjugacy_classes):
            idx[cls] = i
        return idx

    def class_of(self, x: int) -> np.ndarray:
        return self.conjugacy_classes[self.class_index[x]]

    def centralizer(self, x: int) -> "Subgroup":
        mask = self.table[:, x] == self.table[x, :]
        return Subgroup(self, np.flatnonzero(mask))

    def centralizer_of_set(self, xs: Iterable[int]) -> "Subgroup":
        mask = np.ones(self.n, dtype=bool)
        for x in xs:
            mask &= self.table[:, x] == self.table[x, :]
        return Subgroup(self, np.flatnonzero(mask))

    @cached_property
    def center(self) -> "Subgroup":
        mask = np.all(self.table == self.table.T, axis=0)
        return Subgroup(self, np.flatnonzero(mask))

    def closure(self, gens: Iterable[int]) -> "Subgroup":
        return Subgroup(self, closure_elements(self.table, list(gens)))

    @cached_property
    def derived_subgroup(self) -> "Subgroup":
        t, inv = self.table, self.inv
        comms = np.unique(t[t[t[:, :], inv[:, None]], inv[None, :]].ravel())
        # the commutator set is closed under conjugation, so its closure is normal
        return self.closure(comms.tolist())

    @cached_property
    def abelianization(self) -> "Abelianization":
        return _abelianize(self)

    @cached_property
    def minimal_generators(self) -> list[int]:
        return greedy_generators(self)

    def is_normal(self, H: "Subgroup") -> bool:
        mask = H.mask
        for g in self.minimal_generators:
            if not mask[self.table[self.table[g, H.elements], self.inv[g]]].all():
                return False
        return True

    def quotient(self, N: "Subgroup") -> tuple["FiniteGroup", np.ndarray]:
        """G/N together with the projection array G -> G/N."""
        proj = np.full(self.n, -1, dtype=np.int64)
        reps = []
        for x in range(self.n):
            if proj[x] >= 0:
                continue
            coset = self.table[x, N.elements]
            proj[coset] = len(reps)
            reps.append(x)
        reps = np.array(reps)
        table = proj[self.table[np.ix_(reps, reps)]]
        return FiniteGroup(table), proj

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.n})"


def closure_elements(table: np.ndarray, gens: list[int]) -> np.ndarray:
    """Sorted elements of the subgroup generated by gens."""
    n = table.shape[0]
    gens = [int(g) for g in gens if int(g) != 0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        new = []
        for g in gens:
            prod_ = table[frontier, g].astype(np.int64)
            fresh = prod_[~seen[prod_]]
            if fresh.size:
                fresh = np.unique(fresh)
                seen[fresh] = True
                new.append(fresh)
        frontier = np.concatenate(new) if new else np.empty(0, dtype=np.int64)
    return np.flatnonzero(seen)


def greedy_generators(G: FiniteGroup) -> list[int]:
    """A small generating set, built by repeatedly taking the least element
    that enlarges the generated subgroup the most."""
    gens: list[int] = []
    cur = np.zeros(G.n, dtype=bool)
    cur[0] = True
    size = 1
    while size < G.n:
        best, best_size = None, size
        for x in range(1, G.n):
            if cur[x]:
                continue
            s = closure_elements(G.table, gens + [x]).size
            if s > best_size:
                best, best_size = x, s
                if s == G.n:
                    break
        gens.append(best)
        cur[:] = False
        cur[closure_elements(G.table, gens)] = True
        size = int(cur.sum())
    return gens


class Subgroup:
    """A subset of a parent group closed under the group law."""

    def __init__(self, parent: FiniteGroup, elements):
        self.parent = parent
        self.elements = np.unique(np.asarray(elements, dtype=np.int64))
        self.elements.setflags(write=False)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.n, dtype=bool)
        m[self.elements] = True
        return m

    @property
    def order(self) -> int:
        return int(self.elements.size)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x)])

    def __iter__(self):
        return iter(self.elements.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.parent is other.parent and np.array_equal(self.elements, other.elements)

    def __hash__(self) -> int:
        return hash(self.elements.tobytes())

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone group, with the embedding array."""
        els = self.elements
        index = np.full(self.parent.n, -1, dtype=np.int64)
        index[els] = np.arange(els.size)
        table = index[self.parent.table[np.ix_(els, els)]]
        return FiniteGroup(table), els


@dataclass
class GroupHom:
    """A homomorphism given by the image of every domain element."""

    domain: FiniteGroup
    codomain: FiniteGroup
    images: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def is_homomorphism(self) -> bool:
        lhs = self.images[self.domain.table.astype(np.int64)]
        rhs = self.codomain.table[self.images[:, None], self.images[None, :]]
        return bool(np.array_equal(lhs, rhs))

    def kernel(self) -> Subgroup:
        return Subgroup(self.domain, np.flatnonzero(self.images == 0))

    def is_surjective(self) -> bool:
        return np.unique(self.images).size == self.codomain.n


@dataclass
class Abelianization:
    invariants: AbelianInvariants
    quotient: FiniteGroup
    projection: GroupHom
    derived: Subgroup = field(repr=False)


def _abelianize(G: FiniteGroup) -> Abelianization:
    D = G.derived_subgroup
    Q, proj = G.quotient(D)
    inv = AbelianInvariants.from_element_orders(Q.element_orders)
    return Abelianization(inv, Q, GroupHom(G, Q, proj), D)


# construction ----------------------------------------------------------

def parse_cycles(text: str, degree: int | None = None) -> tuple[int, ...]:
    """Parse cycle notation on points 1..d into a 0-based image tuple."""
    text = text.replace(" ", "")
    if text in ("", "()"):
        return tuple(range(degree or 0))
    if text[0] != "(" or text[-1] != ")":
        raise InvalidPermutation(f"bad cycle notation: {text!r}")
    cycles = []
    for chunk in text[1:-1].split(")("):
        try:
            pts = [int(p) for p in chunk.split(",")]
        except ValueError as exc:
            raise InvalidPermutation(f"bad cycle {chunk!r}") from exc
        if any(p < 1 for p in pts) or len(set(pts)) != len(pts):
            raise InvalidPermutation(f"bad cycle {chunk!r}")
        cycles.append(pts)
    moved = [p for c in cycles for p in c]
    if len(set(moved)) != len(moved):
        raise InvalidPermutation("cycles are not disjoint")
    d = max(moved)
    if degree is not None:
        if degree < d:
            raise InvalidPermutation("point exceeds degree")
        d = degree
    img = list(range(d))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            img[a - 1] = b - 1
    return tuple(img)


def _as_image(p, degree: int) -> tuple[int, ...]:
    if isinstance(p, str):
        p = parse_cycles(p, degree)
    p = tuple(int(v) for v in p)
    if len(p) < degree:
        p = p + tuple(range(len(p), degree))
    if sorted(p) != list(range(degree)):
        raise InvalidPermutation(f"not a permutation of {degree} points: {p}")
    return p


def from_generators(gens: Sequence, mul, identity, name: str = "", cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Close a set of hashable generators under ``mul`` and tabulate.

    Elements are numbered in breadth-first order from the identity, right
    multiplying by the generators in the order given.
    """
    index = {identity: 0}
    elems = [identity]
    parent = [(-1, -1)]
    head = 0
    while head < len(elems):
        x = elems[head]
        for j, g in enumerate(gens):
            y = mul(x, g)
            if y not in index:
                if len(elems) >= cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
                index[y] = len(elems)
                elems.append(y)
                parent.append((head, j))
        head += 1
    n = len(elems)
    cols = np.empty((len(gens), n), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, g in enumerate(gens):
            cols[j, i] = index[mul(x, g)]
    # column y of the table equals column parent(y) followed by its generator
    table = np.empty((n, n), dtype=_table_dtype(n))
    table[:, 0] = np.arange(n)
    for y in range(1, n):
        p, j = parent[y]
        table[:, y] = cols[j][table[:, p]]
    return FiniteGroup(table, labels=elems, name=name)


def from_permutations(perms: Sequence, degree: int | None = None, name: str = "", cap: int = DEFAULT_CAP) -> FiniteGroup:
    """The group generated by permutations given as image tuples or cycle strings.

    Composition is left to right: (p*q)(i) = q(p(i)).
    """
    if degree is None:
        degree = 0
        for p in perms:
            if isinstance(p, str):
                pts = [int(t) for t in p.replace("(", ",").replace(")", ",").split(",") if t.strip()]
                degree = max([degree] + pts)
            else:
                degree = max(degree, len(p))
    images = [_as_image(p, degree) for p in perms]
    ident = tuple(range(degree))

    def mul(a, b):
        return tuple(b[i] for i in a)

    return from_generators(images, mul, ident, name=name, cap=cap)


def from_table(table, name: str = "") -> FiniteGroup:
    return FiniteGroup(np.asarray(table), name=name)


def direct_product(A: FiniteGroup, B: FiniteGroup, name: str = "") -> FiniteGroup:
    """A x B with element (a, b) numbered a * |B| + b."""
    na, nb = A.n, B.n
    ta = A.table.astype(np.int64)
    tb = B.table.astype(np.int64)
    table = (ta[:, None, :, None] * nb + tb[None, :, None, :]).reshape(na * nb, na * nb)
    labels = [(a, b) for a in range(na) for b in range(nb)]
    return FiniteGroup(table, labels=labels, name=name or f"{A.name}x{B.name}")


def cycle_words(G: FiniteGroup) -> list[tuple[int, ...]]:
    """Shortest words in the greedy generators for each element (BFS)."""
    gens = G.minimal_generators
    words: list[tuple[int, ...] | None] = [None] * G.n
    words[0] = ()
    q = deque([0])
    while q:
        x = q.popleft()
        for j, g in enumerate(gens):
            y = G.mul(x, g)
            if words[y] is None:
                words[y] = words[x] + (j,)
                q.append(y)
    return words  # type: ignore[return-value]
