from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nacl.abelian import AbelianInvariants
from nacl.errors import CapExceeded, NotGood, NotIndexTwo, NotOrderTwo, NotSurjective
from nacl.groups import Subgroup, closure_elements
from nacl.iso import automorphisms, is_isomorphic
from nacl.named import cyclic, dihedral, elementary, parse_group, symmetric
from nacl.wreath import (admissible_subgroups, aut_fixing, conjectured_averages, count_twist_pairs, embed_wreath,
                         enumerate_admissible, mb_growth, wreath_square)

SMALL_G = ["cyclic:2", "cyclic:3", "cyclic:4", "elementary:2^2", "cyclic:5", "sym:3", "cyclic:6"]


def _types(spec):
    return enumerate_admissible(parse_group(spec))


# the wreath square -------------------------------------------------------------

def test_wreath_orders_and_twists():
    assert wreath_square(cyclic(2)).order == 8
    W = wreath_square(cyclic(3))
    assert W.order == 18 and W.twists.size == 3
    assert wreath_square(parse_group("alt:4")).order == 288
    with pytest.raises(CapExceeded):
        wreath_square(cyclic(10), cap=100)


@pytest.mark.parametrize("spec", ["cyclic:3", "sym:3", "dihedral:8"])
def test_vectorised_product_matches_pairs(spec):
    G = parse_group(spec)
    W = wreath_square(G)
    n = G.n
    for x in range(W.order):
        a, b, s = (int(v) for v in W.decode(x))
        for y in range(0, W.order, 3):
            c, d, t = (int(v) for v in W.decode(y))
            # (a,b) sigma^s (c,d) = (a,b)(c,d) or (a,b)(d,c) sigma
            cc, dd = (d, c) if s else (c, d)
            want = (t ^ s) * n * n + G.mul(a, cc) * n + G.mul(b, dd)
            assert int(W.mul(x, y)) == want


@pytest.mark.parametrize("spec", SMALL_G)
def test_twists_are_the_noncentral_involutions(spec):
    W = wreath_square(parse_group(spec))
    Wg = W.group
    codes = np.arange(W.order)
    outside = W.pi(codes) == 1
    inv2 = codes[outside & (Wg.element_orders == 2)]
    assert np.array_equal(np.sort(inv2), W.twists)
    assert W.twists.size == W.n
    # sigma swaps the coordinates
    ker = codes[~outside]
    conj = W.conj(W.sigma, ker)
    assert np.array_equal(W.proj1(conj), W.proj2(ker))


@given(st.sampled_from(SMALL_G), st.data())
def test_wreath_inverse(spec, data):
    W = wreath_square(parse_group(spec))
    x = data.draw(st.integers(0, W.order - 1))
    assert int(W.mul(x, W.inv(x))) == 0 == int(W.mul(W.inv(x), x))


# admissible enumeration --------------------------------------------------------

def brute_admissible(W):
    """All subgroups of the tabulated wreath square, filtered by the definition."""
    Wg = W.group
    t = Wg.table
    cyclics = {tuple(closure_elements(t, [x])) for x in range(W.order)}
    subgroups = {(0,)}
    frontier = set(subgroups)
    while frontier:
        new = set()
        for H in frontier:
            for C in cyclics:
                J = tuple(closure_elements(t, list(H) + list(C)))
                if J not in subgroups:
                    new.add(J)
        subgroups |= new
        frontier = new
    out = []
    for H in subgroups:
        H = np.array(H)
        _, _, s = W.decode(H)
        c = H[(s == 1) & (Wg.element_orders[H] == 2)]
        if W.sigma not in H or c.size == 0:
            continue
        if not np.array_equal(np.sort(closure_elements(t, c.tolist())), np.sort(H)):
            continue
        a, _, s = W.decode(H)
        if np.unique(a[s == 0]).size == W.n:
            out.append(tuple(sorted(H)))
    return sorted(out)


@pytest.mark.parametrize("spec", ["cyclic:2", "cyclic:3", "cyclic:4", "elementary:2^2"])
def test_admissible_search_matches_full_subgroup_lattice(spec):
    W = wreath_square(parse_group(spec))
    found = sorted(tuple(T.members.tolist()) for T in admissible_subgroups(W))
    assert found == brute_admissible(W)


def test_enumeration_examples():
    (T,) = _types("cyclic:3")
    assert T.order == 6 and T.N == 1 and T.good
    assert is_isomorphic(T.group, symmetric(3))
    (T,) = _types("cyclic:2")
    assert T.order == 4 and T.N == 2 and not T.good
    assert is_isomorphic(T.group, elementary(2, 2))
    A4 = _types("alt:4")
    assert [(T.order, T.N) for T in A4] == [(24, 1), (96, 1)]
    assert is_isomorphic(A4[0].group, symmetric(4))


@pytest.mark.parametrize("spec", SMALL_G + ["dihedral:8", "quaternion:8", "alt:4"])
def test_admissibility_invariants(spec):
    G = parse_group(spec)
    W = wreath_square(G)
    for T in admissible_subgroups(W):
        assert T.mask[W.sigma]
        assert np.array_equal(W.closure(T.c), T.members)
        a, _, s = W.decode(T.members)
        assert set(a[s == 0].tolist()) == set(range(G.n))
        assert T.good == (T.N == 1)
        assert sum(cls.size for cls in T.c_classes) == T.c.size
        reps = T.class_reps
        assert reps == sorted(reps) and all(r == cls.min() for r, cls in zip(reps, T.c_classes))
        if T.good:
            assert T.abelianization_of_Gprime == AbelianInvariants((2,))


# automorphisms fixing G' --------------------------------------------------------

def test_aut_fixing_examples():
    (T,) = _types("cyclic:3")
    assert aut_fixing(cyclic(3), T) == 2
    (T,) = _types("cyclic:2")
    assert aut_fixing(cyclic(2), T) == 1


def test_aut_fixing_a4_by_conjugation_in_s4():
    A4 = parse_group("alt:4")
    T = _types("alt:4")[0]
    W = T.wreath
    # every automorphism of A4 is conjugation by some element of S4
    idx = {lab: i for i, lab in enumerate(A4.labels)}
    count = 0
    seen = set()
    for s in symmetric(4).labels:
        sinv = tuple(np.argsort(s))
        alpha = np.array([idx[tuple(s[x[sinv[i]]] for i in range(4))] for x in A4.labels])
        key = alpha.tobytes()
        if key in seen:
            continue
        seen.add(key)
        a, b, sg = W.decode(T.members)
        img = set(W.encode(alpha[a], alpha[b], sg).tolist())
        count += img == set(T.members.tolist())
    assert len(seen) == 24
    assert aut_fixing(A4, T) == count
    assert 24 % count == 0


# twist lemma and predictions ----------------------------------------------------

def twist_pairs_by_embedding(T):
    """Count (alpha, y) whose embedding of G' lands exactly on G'."""
    W = T.wreath
    G = W.base
    Gp = T.group
    codes = T.members
    a, _, s = W.decode(codes)
    Delta = Subgroup(Gp, np.flatnonzero(s == 0))
    count = 0
    for y in T.index_of(T.c):
        for alpha in automorphisms(G):
            rho = alpha[a]
            hom = embed_wreath(Gp, Delta, rho, int(y), W)
            count += set(hom.images.tolist()) == set(codes.tolist())
    return count


@pytest.mark.parametrize("spec", ["cyclic:3", "cyclic:5", "elementary:3^2", "cyclic:7", "alt:4"])
def test_twist_count_matches_embedding_count(spec):
    T = _types(spec)[0]
    n = count_twist_pairs(T)
    assert n == twist_pairs_by_embedding(T)
    assert n == T.c.size * T.aut_fixing_order


def test_twist_count_examples():
    assert count_twist_pairs(_types("cyclic:3")[0]) == 6
    assert count_twist_pairs(_types("cyclic:5")[0]) == 20
    with pytest.raises(NotGood):
        count_twist_pairs(_types("cyclic:2")[0])


def test_embed_wreath_examples():
    S3 = symmetric(3)
    rot = S3.closure([x for x in range(S3.n) if S3.element_order(x) == 3])
    y = next(x for x in range(S3.n) if S3.element_order(x) == 2)
    C3 = cyclic(3)
    W = wreath_square(C3)
    r = next(x for x in rot.elements if S3.element_order(int(x)) == 3)
    rho = np.zeros(S3.n, dtype=np.int64)
    rho[S3.power(int(r), 1)], rho[S3.power(int(r), 2)] = 1, 2
    hom = embed_wreath(S3, rot, rho, y, W)
    assert np.unique(hom.images).size == 6
    assert set(hom.images.tolist()) == set(_types("cyclic:3")[0].members.tolist())

    D8 = dihedral(8)
    C4 = cyclic(4)
    rot = D8.closure([x for x in range(D8.n) if D8.element_order(x) == 4])
    r = next(int(x) for x in rot.elements if D8.element_order(int(x)) == 4)
    rho = np.zeros(D8.n, dtype=np.int64)
    for k in range(4):
        rho[D8.power(r, k)] = k
    refl = next(x for x in range(D8.n) if x not in rot and D8.element_order(x) == 2)
    W = wreath_square(C4)
    hom = embed_wreath(D8, rot, rho, refl, W)
    img = np.unique(hom.images)
    assert img.size == 8 and W.sigma in img
    (T,) = [T for T in _types("cyclic:4") if set(T.members.tolist()) == set(img.tolist())]
    assert is_isomorphic(T.group, D8)

    V = elementary(2, 2)
    D = V.closure([1])
    y = next(x for x in range(4) if x not in D)
    rho = np.zeros(4, dtype=np.int64)
    rho[1] = 1
    W = wreath_square(cyclic(2))
    hom = embed_wreath(V, D, rho, y, W)
    img = hom.images
    assert np.unique(img).size == 4
    a, b, s = W.decode(img[D.elements])
    assert np.all(a == b)  # y centralizes Delta, so the kernel image sits on the diagonal


def test_embed_wreath_errors():
    S3 = symmetric(3)
    rot = S3.closure([x for x in range(S3.n) if S3.element_order(x) == 3])
    W = wreath_square(cyclic(3))
    rho = np.zeros(6, dtype=np.int64)
    y = next(x for x in range(S3.n) if S3.element_order(x) == 2)
    with pytest.raises(NotIndexTwo):
        embed_wreath(S3, S3.closure([]), rho, y, W)
    with pytest.raises(NotOrderTwo):
        embed_wreath(S3, rot, rho, 0, W)
    with pytest.raises(NotSurjective):
        embed_wreath(S3, rot, rho, y, W)


def test_conjectured_averages():
    T = _types("alt:4")[1]
    P = conjectured_averages(T, AbelianInvariants((2,)))
    assert P.e_tilde_minus == 2 and P.h2_two_torsion == 2
    assert P.e_minus == Fraction(2, T.aut_fixing_order)
    assert P.e_plus == Fraction(2, T.c.size * T.aut_fixing_order)
    (T,) = _types("cyclic:3")
    P = conjectured_averages(T, AbelianInvariants())
    assert P.e_tilde_minus == 1 and P.e_minus == Fraction(1, 2)
    (T,) = _types("cyclic:2")
    P = conjectured_averages(T, AbelianInvariants())
    assert P.e_minus == float("inf") and P.growth_exponent == 1 and not P.finite


@pytest.mark.parametrize("k", [1, 2, 3])
def test_growth_exponent_for_elementary_two_groups(k):
    (T,) = _types(f"elementary:2^{k}" if k > 1 else "cyclic:2")
    assert T.order == 2 ** (k + 1)
    g = mb_growth(T)
    assert g.exponent == T.N - 1 == 2**k - 1
    assert str(g) == f"LogPower({2**k - 1})"


def test_growth_examples():
    assert mb_growth(_types("alt:4")[0]).finite
    q8 = [T for T in _types("quaternion:8") if T.order == 16]
    assert str(mb_growth(q8[0])) == "LogPower(2)"
