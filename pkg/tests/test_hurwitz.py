import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nacl.errors import CapExceeded
from nacl.hurwitz import (Stratum, braid_move, braid_orbits, class_positions, component_invariant,
                          component_invariants, conj_table, enumerate_tuples, frobenius_fixed_components,
                          stratum_reports, surjective_mask)
from nacl.marked import MarkedElement, todd_coxeter
from nacl.named import parse_group
from nacl.wreath import enumerate_admissible


@lru_cache(maxsize=None)
def gtype(spec, which=0):
    return enumerate_admissible(parse_group(spec))[which]


@lru_cache(maxsize=None)
def ubar(spec):
    return todd_coxeter(gtype(spec))


def brute_tuples(T, n, boundary):
    Gp = T.group
    c = T.index_of(T.c).tolist()
    out = []
    for t in itertools.product(range(len(c)), repeat=n):
        acc = 0
        for i in t:
            acc = Gp.mul(acc, c[i])
        if Gp.mul(acc, boundary) == 0:
            out.append(t)
    return sorted(out)


def brute_orbits(T, tuples):
    """Orbits by a plain dictionary BFS over both move directions."""
    Gp = T.group
    c = T.index_of(T.c).tolist()
    pos = {g: i for i, g in enumerate(c)}
    label = {}
    k = 0
    for t in tuples:
        if t in label:
            continue
        label[t] = k
        stack = [t]
        while stack:
            s = stack.pop()
            for i in range(len(s) - 1):
                a, b = c[s[i]], c[s[i + 1]]
                fwd = s[:i] + (pos[Gp.conj(a, b)], s[i]) + s[i + 2:]
                bwd = s[:i] + (s[i + 1], pos[Gp.conj(Gp.inverse(b), a)]) + s[i + 2:]
                for u in (fwd, bwd):
                    if u not in label:
                        label[u] = k
                        stack.append(u)
        k += 1
    return label


def same_partition(a, b):
    pairs = set(zip(a, b))
    return len(pairs) == len(set(a)) == len(set(b))


# enumeration ---------------------------------------------------------------------------

@pytest.mark.parametrize("spec,which,n,bpos", [("cyclic:3", 0, 2, None), ("cyclic:3", 0, 3, 0), ("cyclic:3", 0, 4, None),
                                              ("elementary:3^2", 0, 3, 1), ("cyclic:2", 0, 3, 0),
                                              ("alt:4", 0, 3, 2), ("dihedral:8", 0, 3, None)])
def test_tuple_counts_match_product_search(spec, which, n, bpos):
    T = gtype(spec, which)
    boundary = 0 if bpos is None else int(T.index_of(T.c[bpos]))
    st_ = enumerate_tuples(T, n, boundary)
    got = sorted(map(tuple, st_.entries.tolist()))
    assert got == brute_tuples(T, n, boundary)


def test_s3_pairs():
    T = gtype("cyclic:3")
    st_ = enumerate_tuples(T, 2)
    assert st_.count == 3
    assert all(a == b for a, b in st_.entries)
    labels = braid_orbits(st_)
    assert np.unique(labels).size == 3


def test_empty_and_mixed_class_strata():
    T = gtype("cyclic:2")
    assert enumerate_tuples(T, 0).count == 1
    st0 = enumerate_tuples(T, 2, nbar=np.array([1, 1]))
    assert st0.count == 0  # two distinct commuting involutions never multiply to 1
    assert enumerate_tuples(T, 2, nbar=np.array([2, 0])).count == 1
    E = todd_coxeter(gtype("cyclic:3"))
    assert component_invariant(E, []) == MarkedElement(0, (0,))


def test_tuple_cap():
    with pytest.raises(CapExceeded):
        enumerate_tuples(gtype("alt:4", 1), 8, cap=1000)


# braid moves --------------------------------------------------------------------------

@pytest.mark.parametrize("spec,n", [("cyclic:3", 4), ("elementary:3^2", 4), ("cyclic:2", 4), ("alt:4", 4)])
def test_moves_preserve_product_and_nbar(spec, n):
    T = gtype(spec)
    Gp = T.group
    st_ = enumerate_tuples(T, n)
    ct = conj_table(T)
    cls = class_positions(T)
    r = len(T.c_classes)
    nb = st_.nbar(cls, r)
    for i in range(n - 1):
        moved = Stratum(T, n, 0, braid_move(st_, i, ct), st_.c)
        assert np.array_equal(moved.nbar(cls, r), nb)
        prods = np.zeros(moved.count, dtype=np.int64)
        for j in range(n):
            prods = Gp.table[prods, st_.c[moved.entries[:, j]]]
        assert not prods.any()


@pytest.mark.parametrize("spec,n,bpos", [("cyclic:3", 4, None), ("cyclic:3", 5, 0), ("elementary:3^2", 4, None),
                                         ("alt:4", 3, 0), ("cyclic:5", 4, None)])
def test_orbits_match_dictionary_search(spec, n, bpos):
    T = gtype(spec)
    boundary = 0 if bpos is None else int(T.index_of(T.c[bpos]))
    st_ = enumerate_tuples(T, n, boundary)
    label = brute_orbits(T, [tuple(t) for t in st_.entries.tolist()])
    theirs = [label[tuple(t)] for t in st_.entries.tolist()]
    assert same_partition(braid_orbits(st_).tolist(), theirs)


@given(st.sampled_from(["cyclic:3", "elementary:3^2", "alt:4"]), st.data())
def test_invariant_is_braid_invariant(spec, data):
    T = gtype(spec)
    E = ubar(spec)
    Gp = T.group
    c = T.index_of(T.c).tolist()
    n = data.draw(st.integers(2, 6))
    t = [c[data.draw(st.integers(0, len(c) - 1))] for _ in range(n)]
    i = data.draw(st.integers(0, n - 2))
    moved = t[:i] + [Gp.conj(t[i], t[i + 1]), t[i]] + t[i + 2:]
    assert component_invariant(E, t) == component_invariant(E, moved)
    # concatenation multiplies invariants
    k = data.draw(st.integers(0, n))
    a, b = component_invariant(E, t[:k]), component_invariant(E, t[k:])
    whole = component_invariant(E, t)
    assert whole.u == E.mul(a.u, b.u)
    assert whole.nbar == tuple(x + y for x, y in zip(a.nbar, b.nbar))


@pytest.mark.parametrize("spec,n", [("cyclic:3", 4), ("cyclic:3", 5), ("elementary:3^2", 5), ("cyclic:5", 4),
                                    ("alt:4", 4)])
def test_invariants_constant_and_bounded(spec, n):
    E = ubar(spec)
    h2 = E.kernel_invariants.order
    for boundary in [0] + [int(E.gtype.index_of(r)) for r in E.gtype.class_reps]:
        for rep in stratum_reports(E, n, boundary, surjective_only=False):
            assert rep.constant_on_orbits
            assert rep.invariant_count <= h2
            assert sum(rep.orbit_sizes) == rep.tuple_count
            assert sum(rep.invariant_orbits.values()) == rep.orbit_count


def test_surjective_mask():
    T = gtype("cyclic:3")
    st_ = enumerate_tuples(T, 2)
    assert not surjective_mask(st_).any()
    st4 = enumerate_tuples(T, 4)
    m = surjective_mask(st4)
    assert m.sum() == st4.count - 3  # only the constant tuples (a,a,a,a) fail


def test_stable_examples():
    E = ubar("cyclic:3")
    (rep,) = stratum_reports(E, 4)
    assert rep.orbit_count == rep.invariant_count == 1
    E = ubar("elementary:3^2")
    (rep,) = stratum_reports(E, 6)
    assert rep.orbit_count == 3 and rep.invariant_count == 3 and rep.stable
    d = rep.as_dict()
    assert d["stratum"] == {"boundary": 0, "nbar": [6]} and d["stable"] is True


def test_frobenius_fixed_components():
    E = ubar("cyclic:3")
    y = int(E.gtype.index_of(E.gtype.class_reps[0]))
    assert frobenius_fixed_components(E, 5, y, (1,))[0] == 1
    E = ubar("elementary:3^2")
    y = int(E.gtype.index_of(E.gtype.class_reps[0]))
    assert frobenius_fixed_components(E, 7, y, (3,))[0] == 3
    assert frobenius_fixed_components(E, 5, y, (3,))[0] == 1
    st5 = enumerate_tuples(E.gtype, 5, y)
    st5 = Stratum(E.gtype, 5, y, st5.entries[surjective_mask(st5)], st5.c)
    realized = component_invariants(E, st5)
    count, fixed = frobenius_fixed_components(E, 7, y, (5,), realized)
    assert count == 3 and fixed == np.unique(realized).size == 3
    count, fixed = frobenius_fixed_components(E, 5, y, (5,), realized)
    assert count == 1 and fixed == 1
