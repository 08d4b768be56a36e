"""Nielsen tuples over c, braid orbits and their lifting invariants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded
from .marked import MarkedElement, MarkedUniversalGroup
from .wreath import AdmissibleType

DEFAULT_TUPLE_CAP = 10**8


@dataclass
class Stratum:
    """All tuples of one length with a fixed boundary element.

    ``entries`` holds positions in ``c`` (the sorted G' indices of c).
    """

    gtype: AdmissibleType
    n: int
    boundary: int  # G' index, 0 for the identity
    entries: np.ndarray  # shape (m, n), positions into c
    c: np.ndarray  # G' indices of c

    @property
    def count(self) -> int:
        return int(self.entries.shape[0])

    def nbar(self, class_pos: np.ndarray, r: int) -> np.ndarray:
        out = np.zeros((self.count, r), dtype=np.int64)
        for k in range(r):
            out[:, k] = (class_pos[self.entries] == k).sum(axis=1)
        return out

    def packed(self) -> np.ndarray:
        base = self.c.size
        key = np.zeros(self.count, dtype=np.int64)
        for i in range(self.n):
            key = key * base + self.entries[:, i]
        return key


@dataclass(frozen=True)
class NielsenTuple:
    entries: tuple[int, ...]
    boundary: int
    nbar: tuple[int, ...]
    surjective: bool


@njit(cache=True)
def _enumerate(prod_tab, inv_then, c_index, n, boundary_inv, cap):
    """Prefix search: entries 1..n-1 free, the last is forced by the product."""
    nc = prod_tab.shape[1]
    total = nc ** (n - 1)
    if total > cap:
        return np.empty((0, n), dtype=np.int64), False
    out = np.empty((total, n), dtype=np.int64)
    m = 0
    idx = np.zeros(n, dtype=np.int64)
    for code in range(total):
        v = code
        prod_ = 0
        for i in range(n - 2, -1, -1):
            idx[i] = v % nc
            v //= nc
        for i in range(n - 1):
            prod_ = prod_tab[prod_, idx[i]]
        # last entry must equal prod^-1 * boundary^-1
        last = c_index[inv_then[prod_, boundary_inv]]
        if last >= 0:
            for i in range(n - 1):
                out[m, i] = idx[i]
            out[m, n - 1] = last
            m += 1
    return out[:m], True


def enumerate_tuples(T: AdmissibleType, n: int, boundary: int = 0, nbar=None, cap: int = DEFAULT_TUPLE_CAP) -> Stratum:
    """Tuples (g_1..g_n) over c with g_1...g_n * boundary = 1."""
    Gp = T.group
    c = np.asarray(T.index_of(T.c), dtype=np.int64)
    if n == 0:
        entries = np.zeros((1 if boundary == 0 else 0, 0), dtype=np.int64)
        return Stratum(T, 0, boundary, entries, c)
    c_index = np.full(Gp.n, -1, dtype=np.int64)
    c_index[c] = np.arange(c.size)
    # running product table: prod * c[j]
    prod_tab = Gp.table[:, c].astype(np.int64)
    # inv_then[x, y] = x^-1 y
    inv_then = Gp.table[Gp.inv[:, None], np.arange(Gp.n)[None, :]].astype(np.int64)
    if c.size ** (n - 1) > cap:
        raise CapExceeded(f"{c.size}^{n - 1} prefixes exceed the tuple cap {cap}")
    entries, ok = _enumerate(prod_tab, inv_then, c_index, n, int(Gp.inv[boundary]), cap)
    st = Stratum(T, n, boundary, entries, c)
    if nbar is not None:
        cls = class_positions(T)
        keep = np.all(st.nbar(cls, len(T.c_classes)) == np.asarray(nbar)[None, :], axis=1)
        st = Stratum(T, n, boundary, entries[keep], c)
    return st


def class_positions(T: AdmissibleType) -> np.ndarray:
    """Class number of each element of c (by position in sorted c)."""
    out = np.empty(T.c.size, dtype=np.int64)
    for k, cls in enumerate(T.c_classes):
        out[np.searchsorted(T.c, cls)] = k
    return out


def conj_table(T: AdmissibleType) -> np.ndarray:
    """ct[a, b] = position of c[a] c[b] c[a]^-1 in c."""
    Gp = T.group
    c = np.asarray(T.index_of(T.c), dtype=np.int64)
    prod_ = Gp.table[Gp.table[c[:, None], c[None, :]], Gp.inv[c][:, None]]
    return np.searchsorted(c, prod_)


def braid_move(st: Stratum, i: int, ct: np.ndarray) -> np.ndarray:
    """sigma_i: (.., a, b, ..) -> (.., a b a^-1, a, ..) on every tuple."""
    e = st.entries.copy()
    a, b = st.entries[:, i], st.entries[:, i + 1]
    e[:, i] = ct[a, b]
    e[:, i + 1] = a
    return e


def surjective_mask(st: Stratum) -> np.ndarray:
    Gp = st.gtype.group
    out = np.zeros(st.count, dtype=bool)
    cache: dict[bytes, bool] = {}
    for t in range(st.count):
        key = np.unique(st.entries[t]).tobytes()
        hit = cache.get(key)
        if hit is None:
            hit = Gp.closure(st.c[np.unique(st.entries[t])].tolist()).order == Gp.n
            cache[key] = hit
        out[t] = hit
    return out


def braid_orbits(st: Stratum) -> np.ndarray:
    """Orbit label of each tuple under the braid group."""
    m = st.count
    if m == 0 or st.n < 2:
        return np.arange(m)
    ct = conj_table(st.gtype)
    keys = st.packed()
    order = np.argsort(keys)
    skeys = keys[order]
    rows, cols = [], []
    base = st.c.size
    for i in range(st.n - 1):
        img = braid_move(st, i, ct)
        k = np.zeros(m, dtype=np.int64)
        for j in range(st.n):
            k = k * base + img[:, j]
        pos = np.searchsorted(skeys, k)
        if np.any(pos >= m) or np.any(skeys[np.minimum(pos, m - 1)] != k):
            raise AssertionError("braid move left the stratum")
        rows.append(np.arange(m))
        cols.append(order[pos])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(m, m))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def component_invariants(E: MarkedUniversalGroup, st: Stratum) -> np.ndarray:
    """Product of lifts [g_1]...[g_n] for every tuple, as elements of U."""
    lifts = np.array([E.lift(int(g)) for g in st.c], dtype=np.int64)
    u = np.zeros(st.count, dtype=np.int64)
    for i in range(st.n):
        u = E.mul(u, lifts[st.entries[:, i]])
    return u


def component_invariant(E: MarkedUniversalGroup, entries, r: int | None = None) -> MarkedElement:
    """Invariant of one tuple given as G' indices of its entries."""
    u = 0
    nbar = [0] * E.r
    for g in entries:
        u = E.mul(u, E.lift(int(g)))
        nbar[E.class_of[int(g)]] += 1
    return MarkedElement(u, tuple(nbar))


@dataclass
class OrbitReport:
    group: str
    n: int
    boundary: int
    nbar: tuple[int, ...]
    tuple_count: int
    orbit_count: int
    orbit_sizes: list[int]
    invariant_count: int
    invariant_orbits: dict[int, int] = field(default_factory=dict)
    constant_on_orbits: bool = True

    @property
    def stable(self) -> bool:
        return self.orbit_count == self.invariant_count

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "n": self.n,
            "stratum": {"boundary": self.boundary, "nbar": list(self.nbar)},
            "tuple_count": self.tuple_count,
            "orbit_count": self.orbit_count,
            "invariant_count": self.invariant_count,
            "constant_on_orbits": self.constant_on_orbits,
            "stable": self.stable,
        }


def stratum_reports(E: MarkedUniversalGroup, n: int, boundary: int = 0, surjective_only: bool = True,
                    cap: int = DEFAULT_TUPLE_CAP, name: str = "") -> list[OrbitReport]:
    """Orbit and invariant counts for every nbar with the given length and boundary."""
    T = E.gtype
    st = enumerate_tuples(T, n, boundary, cap=cap)
    if surjective_only and st.count:
        st = Stratum(T, n, boundary, st.entries[surjective_mask(st)], st.c)
    if st.count == 0:
        return []
    cls = class_positions(T)
    nb = st.nbar(cls, E.r)
    labels = braid_orbits(st)
    inv = component_invariants(E, st)
    out = []
    for key in np.unique(nb, axis=0):
        sel = np.all(nb == key[None, :], axis=1)
        lab, iv = labels[sel], inv[sel]
        orbits, sizes = np.unique(lab, return_counts=True)
        # an invariant must be constant on each orbit
        pairs = np.unique(np.stack([lab, iv], axis=1), axis=0)
        constant = pairs.shape[0] == orbits.size
        values, counts = np.unique(pairs[:, 1], return_counts=True)
        out.append(OrbitReport(
            group=name or T.name,
            n=n,
            boundary=int(boundary),
            nbar=tuple(int(v) for v in key),
            tuple_count=int(sel.sum()),
            orbit_count=int(orbits.size),
            orbit_sizes=sorted(int(s) for s in sizes),
            invariant_count=int(values.size),
            invariant_orbits={int(v): int(k) for v, k in zip(values, counts)},
            constant_on_orbits=bool(constant),
        ))
    return out


def frobenius_fixed_components(E: MarkedUniversalGroup, q: int, boundary: int, nbar,
                               realized: np.ndarray | None = None) -> tuple[int, int | None]:
    """Number of q^-1-fixed invariant values over the boundary (via the
    fixed-point count) and, when the realized invariants of an enumerated
    stratum are supplied, how many of those are fixed."""
    count, _ = E.prop_pb_count(q, boundary, nbar)
    if realized is None:
        return count, None
    alpha = pow(int(q), -1, E.exponent)
    fixed = 0
    for u in np.unique(realized):
        x = MarkedElement(int(u), tuple(int(v) for v in nbar))
        if E.discrete_action(alpha, x).u == int(u):
            fixed += 1
    return count, fixed
