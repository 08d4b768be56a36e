"""Isomorphism tests and automorphism groups by generator-image backtracking."""

from __future__ import annotations

from collections import Counter
import numpy as np

from .errors import CapExceeded
from .groups import FiniteGroup, closure_elements

DEFAULT_CAP = 200


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"order {n} exceeds the automorphism/isomorphism cap {cap}")


def fingerprint(G: FiniteGroup) -> tuple:
    """Cheap isomorphism invariants."""
    pairs = Counter()
    for cls in G.conjugacy_classes:
        pairs[(int(G.element_orders[cls[0]]), int(cls.size))] += 1
    return (
        G.n,
        tuple(sorted(pairs.items())),
        G.center.order,
        G.abelianization.invariants.prime_power_factors,
        G.derived_subgroup.order,
    )


class _Plan:
    """BFS layouts of the nested subgroups <g_1>, <g_1, g_2>, ... of a domain."""

    def __init__(self, G: FiniteGroup, gens: list[int]):
        self.G = G
        self.gens = gens
        self.steps = []
        for j in range(1, len(gens) + 1):
            sub = gens[:j]
            elems = closure_elements(G.table, sub)
            levels = []
            seen = np.zeros(G.n, dtype=bool)
            seen[0] = True
            frontier = np.array([0], dtype=np.int64)
            while frontier.size:
                nodes, parents, which = [], [], []
                for i, g in enumerate(sub):
                    prod_ = G.table[frontier, g].astype(np.int64)
                    keep = ~seen[prod_]
                    # first occurrence wins so every node has one parent
                    cand = prod_[keep]
                    cand_par = frontier[keep]
                    uniq, first = np.unique(cand, return_index=True)
                    seen[uniq] = True
                    nodes.append(uniq)
                    parents.append(cand_par[first])
                    which.append(np.full(uniq.size, i))
                if not nodes:
                    break
                nodes = np.concatenate(nodes)
                if nodes.size == 0:
                    break
                levels.append((nodes, np.concatenate(parents), np.concatenate(which)))
                frontier = nodes
            self.steps.append((elems, levels))


def _extend(plan: _Plan, j: int, H: FiniteGroup, himgs: list[int]):
    """Images on <g_1..g_j> if the partial assignment is a well-defined injective hom."""
    elems, levels = plan.steps[j]
    img = np.full(plan.G.n, -1, dtype=np.int64)
    img[0] = 0
    hv = np.array(himgs, dtype=np.int64)
    for nodes, parents, which in levels:
        img[nodes] = H.table[img[parents], hv[which]]
    Gt = plan.G.table
    for i, g in enumerate(plan.gens[: j + 1]):
        if not np.array_equal(img[Gt[elems, g]], H.table[img[elems], himgs[i]]):
            return None
    if np.unique(img[elems]).size != elems.size:
        return None
    return img


def _candidates(G: FiniteGroup, H: FiniteGroup, g: int) -> np.ndarray:
    order = G.element_orders[g]
    csize = G.class_of(g).size
    mask = H.element_orders == order
    cls_sizes = _class_sizes(H)
    mask &= cls_sizes == csize
    return np.flatnonzero(mask)


def _class_sizes(H: FiniteGroup) -> np.ndarray:
    out = np.empty(H.n, dtype=np.int64)
    for cls in H.conjugacy_classes:
        out[cls] = cls.size
    return out


def _search(G: FiniteGroup, H: FiniteGroup, first_only: bool):
    if G.n != H.n:
        return
    gens = G.minimal_generators
    if not gens:
        yield np.zeros(1, dtype=np.int64)
        return
    plan = _Plan(G, gens)
    cands = [_candidates(G, H, g) for g in gens]
    k = len(gens)
    chosen: list[int] = []

    def rec(j):
        for h in cands[j]:
            chosen.append(int(h))
            img = _extend(plan, j, H, chosen)
            if img is not None:
                if j == k - 1:
                    yield img
                else:
                    yield from rec(j + 1)
            chosen.pop()

    for img in rec(0):
        yield img
        if first_only:
            return


def find_isomorphism(G: FiniteGroup, H: FiniteGroup, cap: int = DEFAULT_CAP) -> np.ndarray | None:
    """Images of an isomorphism G -> H, or None."""
    _check_cap(max(G.n, H.n), cap)
    if fingerprint(G) != fingerprint(H):
        return None
    for img in _search(G, H, True):
        return img
    return None


def is_isomorphic(G: FiniteGroup, H: FiniteGroup, cap: int = DEFAULT_CAP) -> bool:
    return find_isomorphism(G, H, cap) is not None


def automorphisms(G: FiniteGroup, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Every automorphism as a row of images, identity first."""
    _check_cap(G.n, cap)
    cached = G.__dict__.get("_automorphisms")
    if cached is not None:
        return cached
    rows = [img for img in _search(G, G, False)]
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), G.n)
    ident = np.arange(G.n)
    first = [0 if np.array_equal(r, ident) else 1 for r in arr]
    arr = arr[np.argsort(first, kind="stable")]
    arr.setflags(write=False)
    G.__dict__["_automorphisms"] = arr
    return arr


def automorphism_group(G: FiniteGroup) -> FiniteGroup:
    """Aut(G) as a FiniteGroup; element i is row i of ``automorphisms(G)``,
    and the product a*b means apply a first, then b."""
    rows = automorphisms(G)
    index = {r.tobytes(): i for i, r in enumerate(rows)}
    m = len(rows)
    table = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            table[i, j] = index[rows[j][rows[i]].tobytes()]
    return FiniteGroup(table, labels=list(rows), name=f"Aut({G.name})")


def inner_automorphisms(G: FiniteGroup) -> np.ndarray:
    rows = {tuple(G.table[G.table[g], G.inv[g]].tolist()) for g in range(G.n)}
    return np.array(sorted(rows), dtype=np.int64)
