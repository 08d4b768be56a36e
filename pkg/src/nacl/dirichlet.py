"""Euler-product coefficient sieves, log-power fits and a genus-count oracle.

Every series here has local factors of the form 1 + a_p p^-s at odd or
admissible primes, so coefficients live on squarefree indices and are
products of the a_p. Arithmetic is exact int64.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import Callable

import numpy as np
from numba import njit

from .errors import CapExceeded, InsufficientRange, NonIntegralAverage

MAX_X = 10**8
FIT_FLOOR = 10**3


def primes_up_to(X: int) -> np.ndarray:
    if X < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(X + 1, dtype=bool)
    s[:2] = False
    s[4::2] = False
    for i in range(3, int(X**0.5) + 1, 2):
        if s[i]:
            s[i * i :: 2 * i] = False
    return np.nonzero(s)[0].astype(np.int64)


@dataclass(frozen=True)
class LocalFactorRule:
    """Factor 1 + a(p) p^-s at each prime; ``coeff`` maps a prime array to a."""

    coeff: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def at(self, primes: np.ndarray) -> np.ndarray:
        return np.asarray(self.coeff(np.asarray(primes, dtype=np.int64)), dtype=np.int64)


@dataclass
class DirichletCoeffs:
    """Coefficients a_1..a_X stored at a[1..X]; a[0] is unused and zero."""

    X: int
    a: np.ndarray

    def __getitem__(self, n: int) -> int:
        return int(self.a[n])

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.a)


@njit(cache=True)
def _sieve(X, primes, ap):
    a = np.zeros(X + 1, dtype=np.int64)
    a[1:] = 1
    for t in range(primes.shape[0]):
        p = primes[t]
        c = ap[t]
        for m in range(p, X + 1, p):
            a[m] *= c
        sq = p * p
        if sq <= X:
            for m in range(sq, X + 1, sq):
                a[m] = 0
    return a


def _max_omega(X: int) -> int:
    w, prod_ = 0, 1
    for p in primes_up_to(200):
        if prod_ * int(p) > X:
            break
        prod_ *= int(p)
        w += 1
    return w


def euler_coeffs(rule: LocalFactorRule, X: int) -> DirichletCoeffs:
    """Expand prod_p (1 + a(p) p^-s) up to X."""
    if X > MAX_X:
        raise CapExceeded(f"X={X} exceeds {MAX_X}")
    X = int(X)
    primes = primes_up_to(X)
    ap = rule.at(primes)
    if ap.size:
        top = int(np.abs(ap).max())
        if top > 1 and top ** _max_omega(X) >= 2**62:
            raise OverflowError("coefficients could exceed int64")
    a = _sieve(X, primes, ap)
    return DirichletCoeffs(X, a)


def mb_rule(order: int, N: int) -> LocalFactorRule:
    """Factor 1 + N p^-s away from the primes dividing ``order``."""
    return LocalFactorRule(lambda p: np.where(order % p == 0, 0, N), f"1+{N}p^-s away from {order}")


def mb_series(T, X: int) -> DirichletCoeffs:
    return euler_coeffs(mb_rule(int(T.members.size), int(T.N)), X)


def character_rule(k: int, chi: int) -> LocalFactorRule:
    """Local factor for the character chi of C_2^(k+1) (bit i = value on e_i).

    Odd primes only. At p = 1 mod 4, or for trivial chi, the factor is
    1 + 2^k p^-s. At p = 3 mod 4 it is 1 - 2^k p^-s when ker chi is the
    first k coordinates and 1 otherwise.
    """
    w = 2**k
    special = chi == 1 << k

    def coeff(p):
        out = np.where(p % 4 == 1, w, 0)
        if chi == 0:
            out = np.where(p % 4 == 3, w, out)
        elif special:
            out = np.where(p % 4 == 3, -w, out)
        return np.where(p == 2, 0, out)

    return LocalFactorRule(coeff, f"chi={chi}")


def f_k_coeffs(k: int, X: int) -> DirichletCoeffs:
    """Average over all 2^(k+1) characters of the twisted Euler products."""
    if not 0 <= k <= 4:
        raise ValueError("k must lie in 0..4")
    nchar = 2 ** (k + 1)
    total = np.zeros(int(X) + 1, dtype=np.int64)
    cache: dict[tuple[bool, bool], np.ndarray] = {}
    for chi in range(nchar):
        # characters with the same regime signature share their series
        key = (chi == 0, chi == 1 << k)
        if key not in cache:
            cache[key] = euler_coeffs(character_rule(k, chi), X).a
        total += cache[key]
    if np.any(total % nchar):
        bad = int(np.nonzero(total % nchar)[0][0])
        raise NonIntegralAverage(f"character sum at n={bad} is {int(total[bad])}, not divisible by {nchar}")
    return DirichletCoeffs(int(X), total // nchar)


def checkpoints(X: int, floor: int = FIT_FLOOR) -> np.ndarray:
    """Powers of two in [floor, X], with X itself appended."""
    pts = [2**j for j in range(64) if floor <= 2**j <= X]
    if not pts or pts[-1] != X:
        pts.append(int(X))
    return np.array(pts, dtype=np.int64)


@dataclass
class LogPowerFit:
    beta: float
    intercept: float
    residual: float
    points: np.ndarray
    sums: np.ndarray

    def rows(self) -> list[tuple[int, int, float, float]]:
        return [(int(x), int(s), self.beta, self.residual) for x, s in zip(self.points, self.sums)]


def logpow_fit(coeffs: DirichletCoeffs, floor: int = FIT_FLOOR) -> LogPowerFit:
    """Slope of log(S(X)/X) against log log X on the upper half of the range.

    The window keeps dyadic checkpoints at or above sqrt(floor * X), the
    top half of [floor, X] on a log scale.
    """
    X = coeffs.X
    if X < 10**4:
        raise InsufficientRange(f"X={X} is below 10^4")
    S = coeffs.partial_sums()
    pts = checkpoints(X, floor)
    pts = pts[pts >= np.sqrt(floor * X)]
    if pts.size < 3:
        raise InsufficientRange("fewer than three checkpoints in the fit window")
    sums = S[pts]
    if np.any(sums <= 0):
        raise InsufficientRange("nonpositive partial sum in the fit window")
    xs = np.log(np.log(pts.astype(float)))
    ys = np.log(sums / pts.astype(float))
    A = np.vstack([xs, np.ones_like(xs)]).T
    (beta, c), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([beta, c]) - ys) ** 2)))
    return LogPowerFit(float(beta), float(c), resid, pts, sums)


# imaginary quadratic fields via genus theory


def squarefree_mask(X: int) -> np.ndarray:
    sf = np.ones(X + 1, dtype=bool)
    sf[0] = False
    for p in primes_up_to(int(X**0.5)):
        sf[p * p :: p * p] = False
    return sf


def _squarefree(x: int) -> bool:
    return all(x % (q * q) for q in range(2, isqrt(x) + 1))


def is_fundamental(d: int) -> bool:
    """Fundamental discriminant test (1 counts as fundamental)."""
    if d == 1:
        return True
    if d == 0:
        return False
    if d % 4 == 1:
        return _squarefree(abs(d))
    if d % 4 == 0:
        r = d // 4
        return r % 4 in (2, 3) and _squarefree(abs(r))
    return False


def fundamental_negative(X: int) -> np.ndarray:
    """Mask over m in 0..X with -m a fundamental discriminant."""
    n = np.arange(X + 1)
    sf = squarefree_mask(X)
    out = (n % 4 == 3) & sf
    idx = np.nonzero((n % 4 == 0) & (n > 0))[0]
    r = idx // 4
    out[idx[sf[r] & ((r % 4 == 1) | (r % 4 == 2))]] = True
    return out


def factorizations(D: int) -> int:
    """Unordered D = D1 D2 with D1, D2 coprime fundamental discriminants, both != 1.

    Exhaustive over divisors; slow but independent of any prime counting.
    """
    m = abs(D)
    count = 0
    for d in range(1, m + 1):
        if m % d:
            continue
        for D1 in (d, -d):
            if D1 == 1 or D % D1:
                continue
            D2 = D // D1
            if D2 == 1 or gcd(D1, D2) != 1:
                continue
            if is_fundamental(D1) and is_fundamental(D2):
                count += 1
    return count // 2


def omega(X: int) -> np.ndarray:
    w = np.zeros(X + 1, dtype=np.int64)
    for p in primes_up_to(X):
        w[p::p] += 1
    return w


def genus_oracle_k1(X: int) -> np.ndarray:
    """g[m] = number of splittings of D = -m, zero when -m is not fundamental.

    A fundamental discriminant with t prime discriminant factors splits in
    2^(t-1) - 1 unordered nontrivial ways; t is the number of distinct
    primes dividing D.
    """
    if X > 10**7:
        raise CapExceeded(f"X={X} exceeds 10^7")
    fund = fundamental_negative(int(X))
    w = omega(int(X))
    g = np.zeros(int(X) + 1, dtype=np.int64)
    g[fund] = 2 ** (w[fund] - 1) - 1
    return g


@dataclass
class GenusComparison:
    points: np.ndarray
    f1_sums: np.ndarray
    genus_sums: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.genus_sums / self.f1_sums

    @property
    def constant(self) -> float:
        """Reconciliation constant, read off at the largest checkpoint."""
        return float(self.ratios[-1])

    def variation(self, span: float = 10.0) -> float:
        """max/min - 1 of the ratio over checkpoints in [X/span, X]."""
        sel = self.points >= self.points[-1] / span
        r = self.ratios[sel]
        return float(r.max() / r.min() - 1)


def genus_comparison(X: int, f1: DirichletCoeffs | None = None) -> GenusComparison:
    f1 = f1 if f1 is not None else f_k_coeffs(1, X)
    g = genus_oracle_k1(X)
    pts = checkpoints(X)
    return GenusComparison(pts, f1.partial_sums()[pts], np.cumsum(g)[pts])
