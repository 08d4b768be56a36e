import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from nacl.localring import echelon, kernel, quotient_invariants, snf, valuation

RINGS = [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)]


def matrices(max_rows=3, max_cols=3):
    @st.composite
    def build(draw):
        p, e = draw(st.sampled_from(RINGS))
        m = draw(st.integers(1, max_rows))
        n = draw(st.integers(1, max_cols))
        q = p**e
        A = np.array(draw(st.lists(st.integers(0, q - 1), min_size=m * n, max_size=m * n))).reshape(m, n)
        return p, e, A
    return build()


def all_vectors(n, q):
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(-1, n)


def test_valuation():
    assert valuation([0, 1, 2, 4, 6, 8], 2, 3).tolist() == [3, 0, 1, 2, 1, 3]
    assert valuation([9, 3, 5], 3, 2).tolist() == [2, 1, 0]


@given(matrices())
def test_kernel_size_matches_brute_force(args):
    p, e, A = args
    q = p**e
    X = all_vectors(A.shape[1], q)
    brute = int(np.sum(~((X @ A.T) % q).any(axis=1)))
    gens, expo, C, Cinv, _ = kernel(A, p, e)
    assert brute == p ** sum(expo)
    for g, a in zip(gens, expo):
        assert not ((A @ g) % q).any()
        # the generator has exact order p^a
        assert ((p**a) * g % q == 0).all()
        assert a == 0 or ((p ** (a - 1)) * g % q).any()
    assert np.array_equal(C @ Cinv % q, np.eye(A.shape[1], dtype=np.int64))


@given(matrices())
def test_snf_preserves_row_module(args):
    p, e, A = args
    q = p**e
    vals, C, Cinv = snf(A, p, e)
    # A C has the same row module size as the diagonal p^vals
    B = A @ C % q
    span = {tuple(v) for v in (all_vectors(A.shape[0], q) @ B) % q}
    expect = 1
    for v in vals:
        expect *= p ** (e - v)
    assert len(span) == expect


@given(matrices())
def test_echelon_spans_same_module(args):
    p, e, A = args
    q = p**e
    basis, has = echelon(A, p, e)
    rows = basis[has]
    combos_a = {tuple(v) for v in all_vectors(A.shape[0], q) @ A % q}
    if rows.shape[0]:
        combos_b = {tuple(v) for v in all_vectors(rows.shape[0], q) @ rows % q}
    else:
        combos_b = {tuple([0] * A.shape[1])}
    assert combos_a == combos_b


def quotient_profile(orders, rels, p):
    """Counts of elements killed by p^k in (sum Z/p^a) / <rels>, by enumeration."""
    elems = list(itertools.product(*[range(p**a) for a in orders]))
    mods = np.array([p**a for a in orders])
    rels = np.asarray(rels, dtype=np.int64).reshape(-1, len(orders)) % mods
    span = {tuple([0] * len(orders))}
    frontier = set(span)
    while frontier:
        new = set()
        for v in frontier:
            for r in rels:
                w = tuple((np.array(v) + r) % mods)
                if w not in span:
                    new.add(w)
        span |= new
        frontier = new
    size = len(elems) // len(span)
    prof = []
    for k in range(1, max(orders) + 1):
        killed = sum(tuple((p**k * np.array(x)) % mods) in span for x in elems)
        prof.append(killed // len(span))
    return size, prof


def profile_of(exps, p, kmax):
    return [int(np.prod([p ** min(a, k) for a in exps])) if exps else 1 for k in range(1, kmax + 1)]


@given(st.sampled_from([(2, 3), (3, 2)]), st.data())
def test_quotient_invariants_match_enumeration(pe, data):
    p, e = pe
    r = data.draw(st.integers(1, 3))
    orders = data.draw(st.lists(st.integers(1, e), min_size=r, max_size=r))
    nrel = data.draw(st.integers(0, 2))
    rels = np.array(data.draw(st.lists(st.integers(0, p**e - 1), min_size=nrel * r, max_size=nrel * r)),
                    dtype=np.int64).reshape(nrel, r)
    exps, _ = quotient_invariants(orders, rels, p, e)
    size, prof = quotient_profile(orders, rels, p)
    assert p ** sum(exps) == size
    assert profile_of(exps, p, max(orders)) == prof
