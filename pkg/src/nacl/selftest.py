"""Fast cross-checks run by ``nacl selftest``."""

from __future__ import annotations

from math import gcd

import numpy as np

from .cocycle import CochainComplexSlice, reduced_schur
from .dirichlet import f_k_coeffs, factorizations, genus_oracle_k1
from .hurwitz import braid_orbits, component_invariants, enumerate_tuples
from .marked import MarkedElement, todd_coxeter
from .named import parse_group
from .wreath import enumerate_admissible


def _good(spec: str):
    return next(T for T in enumerate_admissible(parse_group(spec)) if T.good)


def _routes_agree(spec: str) -> bool:
    T = _good(spec)
    E = todd_coxeter(T)
    return E.kernel_invariants == reduced_schur(T.group, T.index_of(T.c))


def _d2_d1(spec: str) -> bool:
    cx = CochainComplexSlice(parse_group(spec), 2, 1)
    return not ((cx.d2 @ cx.d1).toarray() % 2).any()


def _action_law(spec: str, rng: np.random.Generator, trials: int) -> bool:
    T = _good(spec)
    E = todd_coxeter(T)
    units = [a for a in range(1, E.exponent) if gcd(a, E.exponent) == 1]
    for _ in range(trials):
        u = int(rng.integers(E.order))
        x = MarkedElement(u, tuple(int(v) for v in E.to_lattice[u]))
        a, b = (int(v) for v in rng.choice(units, 2))
        lhs = E.discrete_action(a, E.discrete_action(b, x))
        rhs = E.discrete_action(a * b % E.exponent, x)
        if lhs != rhs:
            return False
    return True


def _braid_constant(spec: str, n: int) -> bool:
    T = _good(spec)
    E = todd_coxeter(T)
    st = enumerate_tuples(T, n)
    labels = braid_orbits(st)
    inv = component_invariants(E, st)
    return np.unique(np.stack([labels, inv], 1), axis=0).shape[0] == np.unique(labels).size


def _f1_closed_form(X: int) -> bool:
    a = f_k_coeffs(1, X).a
    for n in range(1, X + 1):
        if n % 2 == 0:
            want = 0
        else:
            m, ps = n, []
            for p in range(3, int(n**0.5) + 2, 2):
                while m % p == 0:
                    ps.append(p)
                    m //= p
            if m > 1:
                ps.append(m)
            if len(set(ps)) != len(ps):
                want = 0
            else:
                t = sum(1 for p in ps if p % 4 == 3)
                want = 0 if t % 2 else 2 ** (len(ps) - (1 if t else 0))
        if a[n] != want:
            return False
    return True


def _genus(X: int) -> bool:
    g = genus_oracle_k1(X)
    return all(g[m] == factorizations(-m) for m in range(1, X + 1) if g[m] or m % 4 in (0, 3))


def run(seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = [
        ("cyclic:3 gives one good type of order 6", lambda: [(T.order, T.N) for T in enumerate_admissible(parse_group("cyclic:3"))] == [(6, 1)]),
        ("S3 type: coset and cocycle routes agree", lambda: _routes_agree("cyclic:3")),
        ("(C3^2):C2 type: coset and cocycle routes agree", lambda: _routes_agree("elementary:3^2")),
        ("d2 d1 = 0 for S3 mod 2", lambda: _d2_d1("sym:3")),
        ("action law on 200 sampled triples", lambda: _action_law("elementary:3^2", rng, 200)),
        ("lifting invariant constant on braid orbits", lambda: _braid_constant("elementary:3^2", 4)),
        ("f_1 coefficients match the closed form", lambda: _f1_closed_form(2000)),
        ("genus counts match divisor enumeration", lambda: _genus(300)),
    ]
    return [{"check": name, "ok": bool(fn())} for name, fn in checks]
