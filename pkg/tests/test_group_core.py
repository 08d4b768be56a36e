import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nacl.abelian import AbelianInvariants, exterior_square
from nacl.errors import CapExceeded, InvalidPermutation
from nacl.groups import FiniteGroup, direct_product, from_permutations, parse_cycles
from nacl.iso import automorphism_group, automorphisms, find_isomorphism, is_isomorphic
from nacl.named import (alternating, cyclic, dicyclic, dihedral, elementary, heisenberg, parse_group,
                        symmetric)

SMALL = ["cyclic:4", "sym:3", "alt:4", "dihedral:8", "quaternion:8", "elementary:2^3", "direct:cyclic:2*sym:3",
         "heisenberg:3", "sl:2,3", "semidirect:7,3,2"]


def perm_mul(a, b):
    return tuple(b[i] for i in a)


def brute_closure(perms):
    """Plain fixed-point closure of a set of permutation tuples."""
    d = len(perms[0])
    out = {tuple(range(d))}
    frontier = set(out)
    while frontier:
        new = {perm_mul(x, g) for x in frontier for g in perms} - out
        out |= new
        frontier = new
    return out


# construction -------------------------------------------------------------

def test_from_permutations_orders():
    assert from_permutations(["(1,2,3)"]).n == 3
    assert from_permutations(["(1,2)", "(1,2,3)"]).n == 6
    A4 = from_permutations(["(1,2,3)", "(2,3,4)"])
    oracle = brute_closure([parse_cycles("(1,2,3)", 4), parse_cycles("(2,3,4)", 4)])
    assert A4.n == len(oracle) == 12


def test_bfs_indexing_is_deterministic():
    a = from_permutations(["(1,2)", "(1,2,3)"])
    b = from_permutations(["(1,2)", "(1,2,3)"])
    assert np.array_equal(a.table, b.table)
    assert a.labels[1] == parse_cycles("(1,2)", 3)


def test_bad_cycles_and_cap():
    with pytest.raises(InvalidPermutation):
        parse_cycles("(1,1)")
    with pytest.raises(InvalidPermutation):
        parse_cycles("1,2")
    with pytest.raises(CapExceeded):
        from_permutations(["(1,2,3,4,5,6,7,8)", "(1,2)"], cap=1000)


@pytest.mark.parametrize("spec", SMALL)
def test_table_axioms(spec):
    G = parse_group(spec)
    n = G.n
    t = G.table.astype(np.int64)
    assert np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))
    for row in (t, t.T):
        assert np.all(np.sort(row, axis=1) == np.arange(n))
    assert np.all(t[np.arange(n), G.inv] == 0)
    assert np.array_equal(G.inv[G.inv], np.arange(n))
    if n <= 64:
        lhs = t[t[:, :, None], np.arange(n)[None, None, :]]
        rhs = t[np.arange(n)[:, None, None], t[None, :, :]]
        assert np.array_equal(lhs, rhs)


@given(st.sampled_from(SMALL), st.data())
def test_associativity_on_random_triples(spec, data):
    G = parse_group(spec)
    x, y, z = (data.draw(st.integers(0, G.n - 1)) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))


# conjugacy -----------------------------------------------------------------

def brute_classes(G):
    seen, out = set(), []
    for x in range(G.n):
        if x in seen:
            continue
        cls = {G.mul(G.mul(g, x), G.inverse(g)) for g in range(G.n)}
        seen |= cls
        out.append(cls)
    return out


def test_conjugacy_classes_examples():
    assert sorted(len(c) for c in symmetric(3).conjugacy_classes) == [1, 2, 3]
    A4 = alternating(4)
    assert sorted(len(c) for c in A4.conjugacy_classes) == sorted(len(c) for c in brute_classes(A4)) == [1, 3, 4, 4]
    assert [len(c) for c in cyclic(4).conjugacy_classes] == [1, 1, 1, 1]


@pytest.mark.parametrize("spec", SMALL)
def test_classes_partition_and_orbit_stabilizer(spec):
    G = parse_group(spec)
    classes = G.conjugacy_classes
    allx = np.sort(np.concatenate(classes))
    assert np.array_equal(allx, np.arange(G.n))
    assert all(int(c[0]) == int(c.min()) for c in classes)
    for c in classes:
        assert c.size * G.centralizer(int(c[0])).order == G.n


def test_centralizer_examples():
    S3 = symmetric(3)
    t = next(x for x in range(S3.n) if S3.element_order(x) == 2)
    assert S3.centralizer(t).order == 2
    assert S3.centralizer(0).order == 6
    A4 = alternating(4)
    dt = next(x for x in range(A4.n) if A4.element_order(x) == 2)
    brute = [g for g in range(A4.n) if A4.mul(g, dt) == A4.mul(dt, g)]
    assert A4.centralizer(dt).order == len(brute) == 4


def test_closure_examples():
    S3 = symmetric(3)
    ts = [x for x in range(S3.n) if S3.element_order(x) == 2]
    assert S3.closure(ts[:1]).order == 2
    assert S3.closure(ts[:2]).order == 6


@given(st.sampled_from(SMALL), st.data())
def test_closure_idempotent_and_monotone(spec, data):
    G = parse_group(spec)
    S = data.draw(st.lists(st.integers(0, G.n - 1), max_size=3))
    extra = data.draw(st.integers(0, G.n - 1))
    H = G.closure(S)
    assert np.array_equal(G.closure(H.elements.tolist()).elements, H.elements)
    assert np.all(np.isin(H.elements, G.closure(S + [extra]).elements))


def test_abelianization_examples():
    assert symmetric(3).abelianization.invariants == AbelianInvariants((2,))
    A4 = alternating(4)
    comm = {A4.commutator(x, y) for x in range(12) for y in range(12)}
    assert A4.derived_subgroup.order == len(A4.closure(sorted(comm)).elements) == 4
    assert A4.abelianization.invariants == AbelianInvariants((3,))
    assert cyclic(6).abelianization.invariants == AbelianInvariants((2, 3))
    assert cyclic(6).abelianization.projection.is_homomorphism()


# automorphisms and isomorphism ----------------------------------------------

def gl_order(n, p):
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out


def brute_aut_count(G):
    """All bijections fixing 0 that respect the table (tiny groups only)."""
    count = 0
    for perm in itertools.permutations(range(1, G.n)):
        f = np.array((0,) + perm)
        if np.array_equal(f[G.table.astype(np.int64)], G.table[f[:, None], f[None, :]]):
            count += 1
    return count


def test_automorphism_counts():
    assert len(automorphisms(cyclic(3))) == 2
    assert len(automorphisms(elementary(2, 2))) == brute_aut_count(elementary(2, 2)) == gl_order(2, 2)
    assert len(automorphisms(dihedral(8))) == brute_aut_count(dihedral(8)) == 8
    assert len(automorphisms(dicyclic(8))) == brute_aut_count(dicyclic(8)) == 24
    # Aut(A4) is realized by conjugation inside S4 on permutation labels
    A4 = alternating(4)
    idx = {lab: i for i, lab in enumerate(A4.labels)}
    maps = set()
    for s in itertools.permutations(range(4)):
        sinv = tuple(np.argsort(s))
        maps.add(tuple(idx[perm_mul(perm_mul(sinv, x), s)] for x in A4.labels))
    assert len(automorphisms(A4)) == len(maps) == 24
    assert len(automorphisms(elementary(3, 3))) == gl_order(3, 3)
    assert len(automorphisms(heisenberg(3))) == 432


@pytest.mark.parametrize("spec", ["sym:3", "dihedral:8", "alt:4", "elementary:2^2"])
def test_automorphisms_form_a_group(spec):
    G = parse_group(spec)
    A = automorphism_group(G)
    assert A.n == len(automorphisms(G))
    rows = {r.tobytes() for r in automorphisms(G)}
    auts = automorphisms(G)
    for a in auts:
        assert np.argsort(a).astype(np.int64).tobytes() in rows
        for b in auts[:8]:
            assert a[b].tobytes() in rows


def test_isomorphism_examples():
    assert is_isomorphic(cyclic(6), direct_product(cyclic(2), cyclic(3)))
    assert not is_isomorphic(symmetric(3), cyclic(6))
    assert not is_isomorphic(dihedral(8), dicyclic(8))
    assert is_isomorphic(dihedral(6), symmetric(3))
    with pytest.raises(CapExceeded):
        is_isomorphic(symmetric(5), symmetric(5), cap=100)


@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
def test_relabelled_group_is_isomorphic(spec, rnd):
    G = parse_group(spec)
    perm = list(range(1, G.n))
    rnd.shuffle(perm)
    p = np.array([0] + perm)  # new label of old element
    inv = np.argsort(p)
    table = p[G.table.astype(np.int64)[inv[:, None], inv[None, :]]]
    H = FiniteGroup(table)
    f = find_isomorphism(G, H)
    assert f is not None
    assert np.array_equal(f[G.table.astype(np.int64)], H.table[f[:, None], f[None, :]])


# abelian invariants ----------------------------------------------------------

def test_abelian_invariants_basics():
    A = AbelianInvariants.from_cyclic_orders([12, 2])
    assert A.prime_power_factors == (2, 3, 4)
    assert A.order == 24 and str(A) == "C2 x C3 x C4"
    assert str(AbelianInvariants((3, 3))) == "C3^2"
    assert A.torsion_size(2) == 4
    assert A.subtract(AbelianInvariants((2,))) == AbelianInvariants((3, 4))
    with pytest.raises(ValueError):
        A.subtract(AbelianInvariants((8,)))
    assert AbelianInvariants().is_trivial and str(AbelianInvariants()) == "1"


@given(st.lists(st.integers(1, 30), min_size=1, max_size=4))
def test_invariants_from_element_orders_roundtrip(orders):
    if int(np.prod(orders)) > 2000:
        return
    G = cyclic(orders[0])
    for m in orders[1:]:
        G = direct_product(G, cyclic(m))
    A = AbelianInvariants.from_element_orders(G.element_orders)
    assert A == AbelianInvariants.from_cyclic_orders(orders)
    assert A.order == G.n


def test_exterior_square():
    assert exterior_square(AbelianInvariants((2, 2))) == AbelianInvariants((2,))
    assert exterior_square(AbelianInvariants((5,))).is_trivial
    assert exterior_square(AbelianInvariants((3, 3, 3))) == AbelianInvariants((3, 3, 3))
    assert exterior_square(AbelianInvariants((2, 4))) == AbelianInvariants((2,))
