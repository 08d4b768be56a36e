"""The wreath square G wr S2 and its admissible subgroups.

Elements of G wr S2 are coded as integers ``s*n*n + a*n + b`` for the
triple (a, b, s) = (a, b) sigma^s, with multiplication
(a, b, 1)(c, d, t) = (ad, bc, 1 + t).  All arithmetic is vectorised over
arrays of codes, so no Cayley table of the full wreath square is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .abelian import AbelianInvariants
from .errors import CapExceeded, NotGood, NotIndexTwo, NotOrderTwo, NotSurjective
from .groups import DEFAULT_CAP, FiniteGroup, GroupHom, Subgroup
from .iso import automorphisms, is_isomorphic


class WreathSquare:
    def __init__(self, G: FiniteGroup, cap: int = DEFAULT_CAP):
        if 2 * G.n * G.n > cap:
            raise CapExceeded(f"|G wr S2| = {2 * G.n * G.n} exceeds cap {cap}")
        self.base = G
        self.n = G.n
        self.order = 2 * G.n * G.n
        self._t = G.table.astype(np.int64)
        self._inv = G.inv
        self.sigma = self.encode(0, 0, 1)
        self.identity = 0

    def encode(self, a, b, s):
        return np.asarray(s) * self.n * self.n + np.asarray(a) * self.n + np.asarray(b)

    def decode(self, x):
        x = np.asarray(x, dtype=np.int64)
        n = self.n
        return (x // n) % n, x % n, x // (n * n)

    def mul(self, x, y):
        a1, b1, s1 = self.decode(x)
        a2, b2, s2 = self.decode(y)
        t = self._t
        flip = s1 == 1
        left = np.where(flip, t[a1, b2], t[a1, a2])
        right = np.where(flip, t[b1, a2], t[b1, b2])
        return self.encode(left, right, s1 ^ s2)

    def inv(self, x):
        a, b, s = self.decode(x)
        ia, ib = self._inv[a], self._inv[b]
        return self.encode(np.where(s == 1, ib, ia), np.where(s == 1, ia, ib), s)

    def conj(self, g, x):
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def pi(self, x):
        return self.decode(x)[2]

    def proj1(self, x):
        return self.decode(x)[0]

    def proj2(self, x):
        return self.decode(x)[1]

    @cached_property
    def twists(self) -> np.ndarray:
        """The order-2 elements outside the kernel: (g, g^-1, sigma)."""
        g = np.arange(self.n)
        return np.sort(self.encode(g, self._inv[g], 1))

    def closure(self, gens) -> np.ndarray:
        """Sorted codes of the subgroup generated by ``gens``."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            new = []
            for g in gens:
                prod_ = self.mul(frontier, g)
                fresh = prod_[~seen[prod_]]
                if fresh.size:
                    fresh = np.unique(fresh)
                    seen[fresh] = True
                    new.append(fresh)
            frontier = np.concatenate(new) if new else np.empty(0, dtype=np.int64)
        return np.flatnonzero(seen)

    def apply_automorphism(self, alpha: np.ndarray, x):
        a, b, s = self.decode(x)
        return self.encode(alpha[a], alpha[b], s)

    @cached_property
    def group(self) -> FiniteGroup:
        """The full wreath square as a tabulated group (codes as elements)."""
        codes = np.arange(self.order)
        table = self.mul(codes[:, None], codes[None, :])
        return FiniteGroup(table, labels=list(codes), name=f"{self.base.name}wrS2")


def wreath_square(G: FiniteGroup, cap: int = DEFAULT_CAP) -> WreathSquare:
    return WreathSquare(G, cap)


class AdmissibleType:
    """An admissible subgroup G' of G wr S2 together with its marking data."""

    def __init__(self, wreath: WreathSquare, members: np.ndarray, gens=None):
        self.wreath = wreath
        self.members = np.unique(np.asarray(members, dtype=np.int64))
        self.members.setflags(write=False)
        self.name = ""
        self.orbit_size = 1
        tw = wreath.twists
        self.c = tw[np.isin(tw, self.members)]
        self.gens = np.asarray(gens if gens is not None else self.c, dtype=np.int64)

    @property
    def order(self) -> int:
        return int(self.members.size)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.wreath.order, dtype=bool)
        m[self.members] = True
        return m

    def is_admissible(self) -> bool:
        W = self.wreath
        if not self.mask[W.sigma]:
            return False
        if not np.array_equal(W.closure(self.c), self.members):
            return False
        a, _, s = W.decode(self.members)
        return np.unique(a[s == 0]).size == W.n

    @cached_property
    def c_classes(self) -> list[np.ndarray]:
        """Orbits of c under conjugation by G', ordered by least member."""
        W = self.wreath
        c = self.c
        pos = {int(x): i for i, x in enumerate(c)}
        rows, cols = [], []
        for g in self.gens:
            img = W.conj(g, c)
            rows.extend(range(c.size))
            cols.extend(pos[int(v)] for v in img)
        m = c.size
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
        k, labels = connected_components(graph, directed=True, connection="weak")
        classes = [c[labels == i] for i in range(k)]
        classes.sort(key=lambda a: int(a[0]))
        return classes

    @property
    def class_reps(self) -> list[int]:
        return [int(cls[0]) for cls in self.c_classes]

    @property
    def N(self) -> int:
        return len(self.c_classes)

    @property
    def good(self) -> bool:
        return self.N == 1

    @cached_property
    def aut_fixing_order(self) -> int:
        return aut_fixing(self.wreath.base, self)

    @cached_property
    def group(self) -> FiniteGroup:
        """G' tabulated; element i is the i-th smallest code."""
        codes = self.members
        table = np.searchsorted(codes, self.wreath.mul(codes[:, None], codes[None, :]))
        return FiniteGroup(table, labels=list(codes), name=self.name)

    def index_of(self, code) -> np.ndarray:
        return np.searchsorted(self.members, code)

    @cached_property
    def abelianization_of_Gprime(self) -> AbelianInvariants:
        return self.group.abelianization.invariants

    def __repr__(self) -> str:
        return f"AdmissibleType({self.wreath.base.name} -> {self.name or '?'}, order={self.order}, N={self.N})"


def _packed(mask: np.ndarray) -> bytes:
    return np.packbits(mask).tobytes()


def admissible_subgroups(W: WreathSquare) -> list[AdmissibleType]:
    """Every admissible subgroup, found by a breadth-first search over the
    subgroups generated by sigma and sets of twists.  Deduplicated by
    element set; no conjugacy identification."""
    tw = W.twists
    start = W.closure([W.sigma])
    seen = {_packed(np.isin(np.arange(W.order), start))}
    queue = [(start, [int(W.sigma)])]
    found = []
    head = 0
    while head < len(queue):
        members, gens = queue[head]
        head += 1
        T = AdmissibleType(W, members, gens)
        if T.is_admissible():
            found.append(T)
        mask = T.mask
        for t in tw:
            if mask[t]:
                continue
            new = W.closure(gens + [int(t)])
            m = np.zeros(W.order, dtype=bool)
            m[new] = True
            key = _packed(m)
            if key in seen:
                continue
            seen.add(key)
            queue.append((new, gens + [int(t)]))
    return found


def simple_group_types(W: WreathSquare) -> list[AdmissibleType]:
    """Admissible subgroups for a nonabelian simple G, built directly.

    The kernel part is a subdirect product of G x G stable under the swap;
    for simple G that is G x G itself or the graph of an involutive
    automorphism.
    """
    G = W.base
    out = []
    full = AdmissibleType(W, np.arange(W.order))
    if full.is_admissible():
        out.append(full)
    g = np.arange(G.n)
    for alpha in automorphisms(G):
        if not np.array_equal(alpha[alpha], g):
            continue
        members = np.concatenate([W.encode(g, alpha, 0), W.encode(g, alpha, 1)])
        T = AdmissibleType(W, members)
        if T.is_admissible():
            out.append(T)
    return out


@dataclass
class TypeClass:
    """Admissible subgroups of one abstract isomorphism class."""

    representative: AdmissibleType
    embeddings: list[AdmissibleType]
    orbits: int
    consistent_N: bool


def aut_orbits(G: FiniteGroup, types: list[AdmissibleType]) -> list[list[AdmissibleType]]:
    """Group admissible subgroups into Aut(G)-orbits."""
    W = types[0].wreath if types else None
    auts = automorphisms(G)
    key_of = {}
    for i, T in enumerate(types):
        key_of[T.members.tobytes()] = i
    parent = list(range(len(types)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, T in enumerate(types):
        for alpha in auts:
            img = np.sort(W.apply_automorphism(alpha, T.members))
            j = key_of.get(img.tobytes())
            if j is not None:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups: dict[int, list[AdmissibleType]] = {}
    for i in range(len(types)):
        groups.setdefault(find(i), []).append(types[i])
    return [groups[k] for k in sorted(groups)]


def classify(G: FiniteGroup, types: list[AdmissibleType], iso_cap: int = 1152) -> list[TypeClass]:
    """Merge Aut(G)-orbits whose G' are isomorphic, smallest G' first."""
    orbits = aut_orbits(G, types)
    classes: list[TypeClass] = []
    for orb in orbits:
        rep = orb[0]
        rep.orbit_size = len(orb)
        for cls in classes:
            other = cls.representative
            if other.order == rep.order and is_isomorphic(other.group, rep.group, cap=iso_cap):
                cls.embeddings.extend(orb)
                cls.orbits += 1
                cls.consistent_N &= other.N == rep.N
                break
        else:
            classes.append(TypeClass(rep, list(orb), 1, True))
    classes.sort(key=lambda c: (c.representative.order, int(c.representative.members[-1])))
    return classes


def enumerate_admissible(G: FiniteGroup, cap: int = DEFAULT_CAP) -> list[AdmissibleType]:
    """One representative admissible subgroup per abstract isomorphism class."""
    W = wreath_square(G, cap)
    if is_simple_nonabelian(G):
        types = simple_group_types(W)
    else:
        types = admissible_subgroups(W)
    return [cls.representative for cls in classify(G, types)]


def is_simple_nonabelian(G: FiniteGroup) -> bool:
    if G.is_abelian:
        return False
    return all(G.closure(cls.tolist()).order == G.n for cls in G.conjugacy_classes[1:])


def aut_fixing(G: FiniteGroup, T: AdmissibleType) -> int:
    """Number of automorphisms of G mapping G' onto itself."""
    W = T.wreath
    mask = T.mask
    count = 0
    for alpha in automorphisms(G):
        if mask[W.apply_automorphism(alpha, T.members)].all():
            count += 1
    return count


def embed_wreath(Gamma: FiniteGroup, Delta: Subgroup, rho: np.ndarray, y: int, W: WreathSquare) -> GroupHom:
    """Embed Gamma in G wr S2 by x -> (rho(x), rho(y x y^-1)) on Delta and y -> sigma.

    ``rho`` lists the image in G of every element of Delta, indexed by the
    element's number in Gamma.
    """
    if 2 * Delta.order != Gamma.n:
        raise NotIndexTwo("Delta must have index 2")
    if y in Delta or Gamma.element_order(y) != 2:
        raise NotOrderTwo("y must have order 2 and lie outside Delta")
    rho = np.asarray(rho, dtype=np.int64)
    if np.unique(rho[Delta.elements]).size != W.n:
        raise NotSurjective("rho is not onto G")
    images = np.empty(Gamma.n, dtype=np.int64)
    d = Delta.elements
    conj = Gamma.table[Gamma.table[y, d], Gamma.inv[y]]
    images[d] = W.encode(rho[d], rho[conj], 0)
    rest = np.flatnonzero(~Delta.mask)
    x = Gamma.table[rest, Gamma.inv[y]]  # rest = x * y with x in Delta
    images[rest] = W.mul(images[x], W.sigma)
    hom = GroupHom(Gamma, W.group, images)
    if not hom.is_homomorphism():
        raise NotSurjective("construction did not give a homomorphism; is rho a homomorphism?")
    return hom


def count_twist_pairs(T: AdmissibleType) -> int:
    """Count pairs (alpha, y) re-embedding G' onto itself.

    G' is treated abstractly with Delta its kernel part and rho the first
    coordinate; for alpha in Aut(G) and a twist y = (g, g^-1, sigma) in c
    the re-embedded kernel is {(alpha(a), alpha(g b g^-1))}.
    """
    if not T.good:
        raise NotGood("twist counting needs a good type")
    W = T.wreath
    G = W.base
    a, b, s = W.decode(T.members)
    a, b = a[s == 0], b[s == 0]
    kernel_mask = T.mask
    count = 0
    for y in T.c:
        g = int(W.proj1(y))
        gb = G.table[G.table[g, b], G.inv[g]]
        for alpha in automorphisms(G):
            codes = W.encode(alpha[a], alpha[gb], 0)
            # kernel images plus sigma determine the image subgroup
            if kernel_mask[codes].all() and np.unique(codes).size == a.size:
                count += 1
    return count


@dataclass(frozen=True)
class ConjecturePrediction:
    e_minus: Fraction | float
    e_plus: Fraction | float
    e_tilde_minus: Fraction | float
    e_tilde_plus: Fraction | float
    h2_two_torsion: int
    c_size: int
    growth_exponent: int

    @property
    def finite(self) -> bool:
        return self.growth_exponent == 0


def conjectured_averages(T: AdmissibleType, h2: AbelianInvariants) -> ConjecturePrediction:
    t2 = h2.torsion_size(2)
    csize = int(T.c.size)
    if not T.good:
        inf = float("inf")
        return ConjecturePrediction(inf, inf, inf, inf, t2, csize, T.N - 1)
    aut = T.aut_fixing_order
    return ConjecturePrediction(
        e_minus=Fraction(t2, aut),
        e_plus=Fraction(t2, csize * aut),
        e_tilde_minus=Fraction(t2),
        e_tilde_plus=Fraction(t2),
        h2_two_torsion=t2,
        c_size=csize,
        growth_exponent=0,
    )


@dataclass(frozen=True)
class Growth:
    """Finite when exponent is 0; otherwise counts grow like X (log X)^exponent."""

    exponent: int

    @property
    def finite(self) -> bool:
        return self.exponent == 0

    def __str__(self) -> str:
        return "Finite" if self.finite else f"LogPower({self.exponent})"


def mb_growth(T: AdmissibleType) -> Growth:
    return Growth(T.N - 1)
