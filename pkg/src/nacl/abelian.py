"""Finite abelian groups described by their prime-power invariant factors."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import prod

from sympy import factorint


@dataclass(frozen=True)
class AbelianInvariants:
    """Multiset of prime powers, kept sorted; the trivial group has none."""

    prime_power_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(sorted(int(f) for f in self.prime_power_factors if int(f) != 1))
        for f in factors:
            if len(factorint(f)) != 1:
                raise ValueError(f"{f} is not a prime power")
        object.__setattr__(self, "prime_power_factors", factors)

    @property
    def order(self) -> int:
        return prod(self.prime_power_factors)

    @classmethod
    def from_cyclic_orders(cls, orders) -> "AbelianInvariants":
        """Split each cyclic factor Z/n into its primary components."""
        out = []
        for n in orders:
            for p, e in factorint(int(n)).items():
                out.append(p**e)
        return cls(tuple(out))

    @classmethod
    def from_element_orders(cls, orders) -> "AbelianInvariants":
        """Recover the invariants from the multiset of element orders of an abelian group."""
        orders = [int(o) for o in orders]
        n = len(orders)
        out = []
        for p, e in factorint(n).items():
            # sizes of A[p^k] for k = 0..e
            sizes = [sum(1 for o in orders if (p**k) % o == 0) for k in range(e + 1)]
            logs = [_exact_log(s, p) for s in sizes]
            at_least = [logs[k] - logs[k - 1] for k in range(1, e + 1)] + [0]
            for k in range(1, e + 1):
                out.extend([p**k] * (at_least[k - 1] - at_least[k]))
        inv = cls(tuple(out))
        if inv.order != n:
            raise ValueError("element orders do not describe an abelian group")
        return inv

    def p_part(self, p: int) -> "AbelianInvariants":
        return AbelianInvariants(tuple(f for f in self.prime_power_factors if f % p == 0))

    def torsion(self, m: int) -> "AbelianInvariants":
        """The m-torsion subgroup A[m]."""
        from math import gcd

        return AbelianInvariants(tuple(gcd(f, m) for f in self.prime_power_factors))

    def torsion_size(self, m: int) -> int:
        return self.torsion(m).order

    def exponent(self) -> int:
        from math import lcm

        return lcm(1, *self.prime_power_factors)

    def subtract(self, other: "AbelianInvariants") -> "AbelianInvariants":
        """Multiset difference; raises ValueError when other is not a sub-multiset."""
        mine = Counter(self.prime_power_factors)
        mine.subtract(Counter(other.prime_power_factors))
        if any(v < 0 for v in mine.values()):
            raise ValueError(f"{other} is not a summand of {self}")
        return AbelianInvariants(tuple(mine.elements()))

    def __add__(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return AbelianInvariants(self.prime_power_factors + other.prime_power_factors)

    def is_trivial(self) -> bool:
        return not self.prime_power_factors

    def __str__(self) -> str:
        if not self.prime_power_factors:
            return "1"
        parts = []
        for f, k in sorted(Counter(self.prime_power_factors).items()):
            parts.append(f"C{f}" if k == 1 else f"C{f}^{k}")
        return " x ".join(parts)


def _exact_log(n: int, p: int) -> int:
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    if n != 1:
        raise ValueError("not a prime power")
    return k


def exterior_square(inv: AbelianInvariants) -> AbelianInvariants:
    """Lambda^2 of a finite abelian group: sum over i<j of Z/gcd(n_i, n_j)."""
    from math import gcd

    f = inv.prime_power_factors
    return AbelianInvariants.from_cyclic_orders(
        gcd(f[i], f[j]) for i in range(len(f)) for j in range(i + 1, len(f))
    )
