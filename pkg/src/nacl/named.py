"""Standard small groups and the group-literal parser used by the CLI."""

from __future__ import annotations

import itertools
import re
from functools import lru_cache

import numpy as np
from sympy import factorint

from .groups import FiniteGroup, direct_product, from_generators, from_permutations


def cyclic(n: int) -> FiniteGroup:
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, labels=list(range(n)), name=f"C{n}")


def dihedral(order: int) -> FiniteGroup:
    """Dihedral group of the given (even) order; D4 is the Klein group."""
    if order % 2 or order < 2:
        raise ValueError("dihedral order must be even")
    n = order // 2
    if n == 1:
        return cyclic(2)

    def mul(x, y):
        (a, s), (b, t) = x, y
        return ((a + (-b if s else b)) % n, s ^ t)

    return from_generators([(1, 0), (0, 1)], mul, (0, 0), name=f"D{order}")


def dicyclic(order: int) -> FiniteGroup:
    """Generalised quaternion / dicyclic group of order 4m."""
    if order % 4:
        raise ValueError("dicyclic order must be divisible by 4")
    m = order // 4

    # elements a^i x^j with a^{2m}=1, x^2=a^m, x a x^-1 = a^-1
    def mul(u, v):
        (i, j), (k, l) = u, v
        if j == 0:
            return ((i + k) % (2 * m), l)
        if l == 0:
            return ((i - k) % (2 * m), 1)
        return ((i - k + m) % (2 * m), 0)

    return from_generators([(1, 0), (0, 1)], mul, (0, 0), name=f"Dic{order}")


def elementary(p: int, k: int) -> FiniteGroup:
    G = cyclic(p)
    out = G
    for _ in range(k - 1):
        out = direct_product(out, G)
    out.name = f"C{p}^{k}"
    return out


def symmetric(n: int) -> FiniteGroup:
    if n <= 1:
        return FiniteGroup(np.zeros((1, 1), dtype=int), name=f"S{n}")
    if n == 2:
        return from_permutations([(1, 0)], name="S2")
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return from_permutations(gens, name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    if n <= 2:
        return FiniteGroup(np.zeros((1, 1), dtype=int), name=f"A{n}")
    gens = []
    for i in range(2, n):
        img = list(range(n))
        img[0], img[1], img[i] = 1, i, 0  # 3-cycle (0 1 i)
        gens.append(tuple(img))
    return from_permutations(gens, name=f"A{n}")


def semidirect_cyclic(n: int, m: int, r: int) -> FiniteGroup:
    """C_n x| C_m where the generator of C_m acts on C_n by x -> r x."""
    if pow(r, m, n) != 1 % n:
        raise ValueError(f"{r}^{m} is not 1 mod {n}")

    def mul(u, v):
        (a, b), (c, d) = u, v
        return ((a + pow(r, b, n) * c) % n, (b + d) % m)

    return from_generators([(1, 0), (0, 1)], mul, (0, 0), name=f"C{n}:C{m}")


def _matmul(p):
    def mul(A, B):
        d = int(round(len(A) ** 0.5))
        out = []
        for i in range(d):
            for j in range(d):
                out.append(sum(A[i * d + k] * B[k * d + j] for k in range(d)) % p)
        return tuple(out)

    return mul


def matrix_group(gens, p: int, name: str = "") -> FiniteGroup:
    d = int(round(len(gens[0]) ** 0.5))
    ident = tuple(int(i == j) for i in range(d) for j in range(d))
    return from_generators([tuple(g) for g in gens], _matmul(p), ident, name=name)


def heisenberg(p: int) -> FiniteGroup:
    return matrix_group([(1, 1, 0, 0, 1, 0, 0, 0, 1), (1, 0, 0, 0, 1, 1, 0, 0, 1)], p, name=f"He{p}")


def special_linear_2(p: int) -> FiniteGroup:
    return matrix_group([(1, 1, 0, 1), (1, 0, 1, 1)], p, name=f"SL(2,{p})")


def general_linear_2(p: int) -> FiniteGroup:
    g = next(x for x in range(2, p) if all(pow(x, (p - 1) // q, p) != 1 for q in factorint(p - 1))) if p > 2 else 1
    return matrix_group([(1, 1, 0, 1), (1, 0, 1, 1), (g, 0, 0, 1)], p, name=f"GL(2,{p})")


def psl32() -> FiniteGroup:
    """PSL(3,2) acting on the seven nonzero vectors of F_2^3."""
    pts = [v for v in itertools.product((0, 1), repeat=3) if any(v)]
    index = {v: i for i, v in enumerate(pts)}

    def act(M):
        return tuple(index[tuple(sum(M[i][k] * v[k] for k in range(3)) % 2 for i in range(3))] for v in pts)

    A = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    B = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    return from_permutations([act(A), act(B)], name="PSL(3,2)")


def pgl27() -> FiniteGroup:
    """PGL(2,7) acting on the projective line over F_7."""
    pts = [(x, 1) for x in range(7)] + [(1, 0)]

    def norm(v):
        x, y = v[0] % 7, v[1] % 7
        if y:
            return (x * pow(y, -1, 7) % 7, 1)
        return (1, 0)

    index = {v: i for i, v in enumerate(pts)}

    def act(M):
        return tuple(index[norm((M[0] * v[0] + M[1] * v[1], M[2] * v[0] + M[3] * v[1]))] for v in pts)

    return from_permutations([act((1, 1, 0, 1)), act((3, 0, 0, 1)), act((0, 1, 1, 0))], name="PGL(2,7)")


def wreath_c2(G: FiniteGroup) -> FiniteGroup:
    """G wr C2 with elements (a, b, s); (a,b,1)(c,d,t) = (ad, bc, 1+t)."""
    n = G.n
    t = G.table.astype(np.int64)
    codes = np.arange(2 * n * n)
    s, a, b = codes // (n * n), (codes // n) % n, codes % n
    S1, A1, B1 = s[:, None], a[:, None], b[:, None]
    S2, A2, B2 = s[None, :], a[None, :], b[None, :]
    left = np.where(S1 == 0, t[A1, A2], t[A1, B2])
    right = np.where(S1 == 0, t[B1, B2], t[B1, A2])
    table = (S1 ^ S2) * n * n + left * n + right
    return FiniteGroup(table, labels=list(codes), name=f"{G.name}wrC2")


_SIMPLE = {
    "cyclic": lambda a: cyclic(int(a)),
    "dihedral": lambda a: dihedral(int(a)),
    "quaternion": lambda a: dicyclic(int(a)),
    "dicyclic": lambda a: dicyclic(int(a)),
    "sym": lambda a: symmetric(int(a)),
    "alt": lambda a: alternating(int(a)),
    "heisenberg": lambda a: heisenberg(int(a)),
}


@lru_cache(maxsize=None)
def parse_group(text: str) -> FiniteGroup:
    """Parse a group literal: a name such as ``dihedral:8`` or
    ``direct:cyclic:2*sym:3``, or a list of permutations in cycle notation
    separated by ``;``."""
    text = text.strip()
    if text.startswith("("):
        perms = [p for p in re.split(r"[;\s]+", text) if p]
        return from_permutations(perms, name=text)
    kind, _, arg = text.partition(":")
    kind = kind.lower()
    if kind == "direct":
        parts = [parse_group(p) for p in arg.split("*")]
        out = parts[0]
        for p in parts[1:]:
            out = direct_product(out, p)
        out.name = text
        return out
    if kind == "elementary":
        m = re.fullmatch(r"(\d+)\^(\d+)", arg)
        if not m:
            raise ValueError(f"expected elementary:p^k, got {text!r}")
        return elementary(int(m[1]), int(m[2]))
    if kind == "semidirect":
        n, m, r = (int(v) for v in arg.split(","))
        return semidirect_cyclic(n, m, r)
    if kind == "sl" and arg.replace(" ", "") in ("2,3", "2,5"):
        return special_linear_2(int(arg.split(",")[1]))
    if kind == "gl" and arg.startswith("2,"):
        return general_linear_2(int(arg.split(",")[1]))
    if kind == "psl" and arg.replace(" ", "") in ("3,2", "2,7"):
        return psl32()
    if kind == "pgl" and arg.replace(" ", "") == "2,7":
        return pgl27()
    if kind in _SIMPLE:
        G = _SIMPLE[kind](arg)
        G.name = text
        return G
    raise ValueError(f"unknown group literal {text!r}")
