"""Reference constructions for small G' and the row builders behind the tables.

Groups carrying a library identifier in their name ("[227]") are built
from an explicit description and matched by isomorphism testing; the
identifier itself is not looked up anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .abelian import AbelianInvariants
from .cocycle import reduced_schur
from .groups import FiniteGroup, Subgroup, direct_product, from_generators
from .iso import automorphisms, is_isomorphic
from .marked import todd_coxeter
from .named import (alternating, cyclic, dicyclic, dihedral, elementary, general_linear_2, heisenberg,
                    parse_group, pgl27, psl32, semidirect_cyclic, special_linear_2, symmetric, wreath_c2)
from .wreath import (AdmissibleType, admissible_subgroups, classify, enumerate_admissible, is_simple_nonabelian,
                     simple_group_types, wreath_square)

# constructions ----------------------------------------------------------


def semidirect_involution(G: FiniteGroup, alpha: np.ndarray, name: str = "") -> FiniteGroup:
    """G : C2 with the generator acting by the involution alpha.

    Element (g, s) is numbered s * |G| + g.
    """
    n = G.n
    alpha = np.asarray(alpha, dtype=np.int64)
    t = G.table.astype(np.int64)
    codes = np.arange(2 * n)
    s, g = codes // n, codes % n
    # (g, s)(h, u) = (g alpha^s(h), s + u)
    h_tw = np.where(s[:, None] == 1, alpha[g][None, :], g[None, :])
    prod_g = t[g[:, None], h_tw]
    table = (s[:, None] ^ s[None, :]) * n + prod_g
    return FiniteGroup(table, name=name)


def inversion(A: FiniteGroup) -> np.ndarray:
    if not A.is_abelian:
        raise ValueError("inversion is an automorphism only for abelian groups")
    return A.inv.astype(np.int64)


def generalized_dihedral(A: FiniteGroup, name: str = "") -> FiniteGroup:
    return semidirect_involution(A, inversion(A), name)


def central_product(A: FiniteGroup, B: FiniteGroup, za: int, zb: int, name: str = "") -> FiniteGroup:
    """(A x B) / <(za, zb)> for central elements of order 2."""
    P = direct_product(A, B)
    z = za * B.n + zb
    Q, _ = P.quotient(Subgroup(P, [0, z]))
    Q.name = name
    return Q


def _central_involution(G: FiniteGroup) -> int:
    Z = G.center.elements
    return int(next(z for z in Z if G.element_order(int(z)) == 2))


def fiber_over_abelianization(G: FiniteGroup, name: str = "") -> FiniteGroup:
    """{(a, b) s in G wr C2 : a b lies in the derived subgroup}."""
    W = wreath_c2(G)
    n = G.n
    proj = G.abelianization.projection.images
    Q = G.abelianization.quotient
    codes = np.arange(W.n)
    a, b = (codes // n) % n, codes % n
    keep = Q.table[proj[a], proj[b]] == 0
    H, _ = Subgroup(W, np.flatnonzero(keep)).as_group()
    H.name = name
    return H


def sign_semidirect(n: int, H: FiniteGroup, kernel_mask: np.ndarray, name: str = "") -> FiniteGroup:
    """C_n : H where H acts by inversion outside the given index-2 kernel."""
    sign = np.where(kernel_mask, 1, -1)

    def mul(x, y):
        return ((x[0] + sign[x[1]] * y[0]) % n, int(H.table[x[1], y[1]]))

    gens = [(1, 0)] + [(0, int(h)) for h in H.minimal_generators]
    return from_generators(gens, mul, (0, 0), name=name)


def index_two_kernels(H: FiniteGroup) -> list[np.ndarray]:
    """Masks of all index-2 subgroups, found among two-generator closures."""
    found = {}
    for x in range(H.n):
        for y in range(x, H.n):
            S = H.closure([x, y])
            if 2 * S.order == H.n:
                found.setdefault(S.elements.tobytes(), S.mask)
    return list(found.values())


def heisenberg_involution(G: FiniteGroup) -> np.ndarray:
    """An involution of a group of order p^3 fixing the centre and inverting G^ab."""
    proj = G.abelianization.projection.images
    Q = G.abelianization.quotient
    Z = G.center.elements
    for alpha in automorphisms(G):
        if not np.array_equal(alpha[alpha], np.arange(G.n)):
            continue
        if not np.array_equal(alpha[Z], Z):
            continue
        if np.all(Q.table[proj[alpha], proj] == 0):
            return alpha
    raise ValueError("no such involution")


def _c3_d8_trivial_klein() -> FiniteGroup:
    D8 = dihedral(8)
    for mask in index_two_kernels(D8):
        els = np.flatnonzero(mask)
        if all(D8.element_order(int(x)) <= 2 for x in els):
            return sign_semidirect(3, D8, mask)
    raise AssertionError("D8 has a Klein four subgroup")


# reference catalog ------------------------------------------------------

IDENTIFY_CAP = 1152


@dataclass(frozen=True)
class Reference:
    name: str
    order: int
    build: Callable[[], FiniteGroup]


def _d(n):
    return lambda: dihedral(n)


def _prod(*fs):
    def build():
        out = fs[0]()
        for f in fs[1:]:
            out = direct_product(out, f())
        return out
    return build


_REFS: list[Reference] = [
    Reference("C2^2", 4, lambda: elementary(2, 2)),
    Reference("S3", 6, lambda: symmetric(3)),
    Reference("C2^3", 8, lambda: elementary(2, 3)),
    Reference("C2^4", 16, lambda: elementary(2, 4)),
    Reference("C2xD8", 16, _prod(lambda: cyclic(2), _d(8))),
    Reference("(C4xC2):C2 [13]", 16, lambda: central_product(cyclic(4), dihedral(8), 2, _central_involution(dihedral(8)))),
    Reference("(C3^2):C2 [4]", 18, lambda: generalized_dihedral(elementary(3, 2))),
    Reference("(C6xC2):C2 [8]", 24, _c3_d8_trivial_klein),
    Reference("S4", 24, lambda: symmetric(4)),
    Reference("C2^2xS3", 24, _prod(lambda: elementary(2, 2), lambda: symmetric(3))),
    Reference("(C2xD8):C2 [49]", 32,
              lambda: central_product(dihedral(8), dihedral(8), _central_involution(dihedral(8)), _central_involution(dihedral(8)))),
    Reference("(C2xQ8):C2 [50]", 32,
              lambda: central_product(dihedral(8), dicyclic(8), _central_involution(dihedral(8)), _central_involution(dicyclic(8)))),
    Reference("S3xS3", 36, _prod(lambda: symmetric(3), lambda: symmetric(3))),
    Reference("GL(2,3)", 48, lambda: general_linear_2(3)),
    Reference("(C5^2):C2 [4]", 50, lambda: generalized_dihedral(elementary(5, 2))),
    Reference("(C9xC3):C2 [7]", 54, lambda: generalized_dihedral(direct_product(cyclic(9), cyclic(3)))),
    Reference("((C3^2):C3):C2 [8]", 54, lambda: semidirect_involution(heisenberg(3), heisenberg_involution(heisenberg(3)))),
    Reference("(C3^3):C2 [14]", 54, lambda: generalized_dihedral(elementary(3, 3))),
    Reference("(C6xS3):C2 [22]", 72, lambda: fiber_over_abelianization(dicyclic(12))),
    Reference("C2xS3^2", 72, _prod(lambda: cyclic(2), lambda: symmetric(3), lambda: symmetric(3))),
    Reference("((C2^4):C3):C2 [227]", 96, lambda: fiber_over_abelianization(alternating(4))),
    Reference("D10^2", 100, _prod(_d(10), _d(10))),
    Reference("S5", 120, lambda: symmetric(5)),
    Reference("A5xC2", 120, _prod(lambda: alternating(5), lambda: cyclic(2))),
    Reference("(C3x((C3^2):C3)):C2 [46]", 162, lambda: fiber_over_abelianization(heisenberg(3))),
    Reference("((C9xC3):C3):C2 [17]", 162, lambda: fiber_over_abelianization(semidirect_cyclic(9, 3, 4))),
    Reference("D14^2", 196, _prod(_d(14), _d(14))),
    Reference("((C7^2):C3):C2 [7]", 294, lambda: fiber_over_abelianization(semidirect_cyclic(7, 3, 2))),
    Reference("PSL(3,2):C2 [208]", 336, pgl27),
    Reference("PSL(3,2)xC2", 336, _prod(psl32, lambda: cyclic(2))),
    Reference("((Q8^2):C3):C2 [18130]", 384, lambda: fiber_over_abelianization(special_linear_2(3))),
]
_REFS += [Reference(f"D{n}", n, _d(n)) for n in range(8, 64, 2)]


@lru_cache(maxsize=None)
def _built(i: int) -> FiniteGroup:
    return _REFS[i].build()


def reference_names() -> list[str]:
    return [r.name for r in _REFS]


def reference_group(name: str) -> FiniteGroup:
    for i, r in enumerate(_REFS):
        if r.name == name:
            return _built(i)
    raise KeyError(name)


def identify(T: AdmissibleType, gname: str = "G") -> str:
    """Name of G' from the reference catalog, or a placeholder with its order."""
    base = T.wreath.base
    if T.order == 2 * base.n**2:
        return f"{gname} wr C2"
    Gp = T.group
    for i, r in enumerate(_REFS):
        if r.order == T.order and is_isomorphic(Gp, _built(i), cap=IDENTIFY_CAP):
            return r.name
    return f"?{T.order}"


# rows ---------------------------------------------------------------------


@dataclass
class TypeRow:
    g_name: str
    g_order: int
    gp_name: str
    gp_order: int
    N: int
    good: bool
    consistent: bool = True

    def as_dict(self) -> dict:
        return {"G": self.g_name, "G_order": self.g_order, "Gprime": self.gp_name,
                "Gprime_order": self.gp_order, "classes_in_c": self.N, "good": self.good}


@dataclass
class H2Row:
    g_name: str
    g_order: int
    gp_name: str
    gp_order: int
    h2: str
    center: int
    method: str
    coset: str | None = None
    cocycle: str | None = None
    agree: bool = True

    def as_dict(self) -> dict:
        return {"G": self.g_name, "G_order": self.g_order, "Gprime": self.gp_name, "Gprime_order": self.gp_order,
                "H2": self.h2, "center": self.center, "method": self.method,
                "coset": self.coset, "cocycle": self.cocycle, "agree": self.agree}


# the wreath square of each group below is too large to enumerate or
# tabulate here; values are carried over as recorded
RECORDED_H2 = {
    ("alt:5", 7200): ("A5 wr C2", AbelianInvariants((2,)), 1),
    ("psl:3,2", 56448): ("PSL(3,2) wr C2", AbelianInvariants((2,)), 1),
}


def type_rows(spec: str, gname: str | None = None, cap: int = 10**6) -> list[TypeRow]:
    G = parse_group(spec)
    gname = gname or display_name(spec)
    W = wreath_square(G, cap)
    types = simple_group_types(W) if is_simple_nonabelian(G) else admissible_subgroups(W)
    rows = []
    for cls in classify(G, types):
        T = cls.representative
        rows.append(TypeRow(gname, G.n, identify(T, gname), T.order, T.N, T.good, cls.consistent_N))
    rows.sort(key=lambda r: (r.g_order, r.gp_order, r.gp_name))
    return rows


def h2_rows(spec: str, gname: str | None = None, cap_order: int = 400, cap_cocycle: int = 200,
            cap_cosets: int = 10**6, cap: int = 10**6) -> list[H2Row]:
    """One row per good type: H2(G', c) by the coset route and, when small
    enough, the cocycle route, with |Z(G')|."""
    G = parse_group(spec)
    gname = gname or display_name(spec)
    rows = []
    big = [(o, v) for (s, o), v in RECORDED_H2.items() if s == spec]
    for T in enumerate_admissible(G, cap):
        if not T.good:
            continue
        if T.order > cap_order:
            continue
        name = identify(T, gname)
        coset = todd_coxeter(T, cap=cap_cosets)
        h2c = coset.kernel_invariants
        center = int(T.group.center.order)
        cocyc = None
        method = "coset"
        if T.order <= cap_cocycle:
            cocyc = reduced_schur(T.group, T.index_of(T.c), cap=cap_cocycle)
            method = "coset+cocycle"
        agree = cocyc is None or cocyc == h2c
        # the enumerated group must be a central extension of the predicted size
        agree &= coset.kernel_is_central() and coset.predicted_order(h2c.order) == coset.order
        rows.append(H2Row(gname, G.n, name, T.order, str(h2c), center, method,
                          str(h2c), None if cocyc is None else str(cocyc), agree))
    for order, (name, h2, center) in big:
        rows.append(H2Row(gname, G.n, name, order, str(h2), center, "recorded"))
    rows.sort(key=lambda r: (r.g_order, r.gp_order, r.gp_name))
    return rows


def h2_invariants(T: AdmissibleType, cap_cosets: int = 10**6) -> AbelianInvariants:
    return todd_coxeter(T, cap=cap_cosets).kernel_invariants


# groups behind the two tables, as (literal, display name)
TYPE_CHART_GROUPS = [
    ("cyclic:2", "C2"), ("cyclic:3", "C3"), ("cyclic:4", "C4"), ("elementary:2^2", "C2^2"),
    ("cyclic:5", "C5"), ("sym:3", "S3"), ("cyclic:6", "C6"), ("cyclic:7", "C7"), ("cyclic:8", "C8"),
    ("direct:cyclic:4*cyclic:2", "C4xC2"), ("dihedral:8", "D8"), ("quaternion:8", "Q8"),
    ("elementary:2^3", "C2^3"), ("cyclic:9", "C9"), ("elementary:3^2", "C3^2"), ("dihedral:10", "D10"),
    ("cyclic:10", "C10"), ("cyclic:11", "C11"), ("dicyclic:12", "C3:C4 [1]"), ("cyclic:12", "C12"),
    ("alt:4", "A4"), ("dihedral:12", "D12"), ("direct:cyclic:6*cyclic:2", "C6xC2"), ("cyclic:13", "C13"),
    ("dihedral:14", "D14"), ("cyclic:14", "C14"), ("cyclic:15", "C15"), ("alt:5", "A5"), ("psl:3,2", "PSL(3,2)"),
]

H2_CHART_GROUPS = [
    ("cyclic:3", "C3"), ("cyclic:5", "C5"), ("cyclic:7", "C7"), ("cyclic:9", "C9"), ("elementary:3^2", "C3^2"),
    ("cyclic:11", "C11"), ("alt:4", "A4"), ("cyclic:13", "C13"), ("cyclic:15", "C15"), ("cyclic:17", "C17"),
    ("cyclic:19", "C19"), ("semidirect:7,3,2", "C7:C3 [1]"), ("cyclic:21", "C21"), ("cyclic:23", "C23"),
    ("sl:2,3", "SL(2,3)"), ("cyclic:25", "C25"), ("elementary:5^2", "C5^2"), ("cyclic:27", "C27"),
    ("direct:cyclic:9*cyclic:3", "C9xC3"), ("heisenberg:3", "(C3^2):C3 [3]"), ("semidirect:9,3,4", "C9:C3 [4]"),
    ("elementary:3^3", "C3^3"), ("cyclic:29", "C29"), ("cyclic:31", "C31"), ("alt:5", "A5"), ("psl:3,2", "PSL(3,2)"),
]

DISPLAY = dict(TYPE_CHART_GROUPS + H2_CHART_GROUPS)


def display_name(spec: str) -> str:
    return DISPLAY.get(spec, spec)
