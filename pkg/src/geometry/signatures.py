"""Signatures of periodic subvarieties of (P^1)^n: constant coordinates plus ordered chains."""
import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from sympy.utilities.iterables import multiset_partitions


@dataclass(frozen=True)
class Signature:
    """
    J_V and the ordered chains J_1, ..., J_k partitioning the other coordinates.

    Coordinates are 1-based. Chains are stored sorted so that two signatures
    with the same chains in another listing order compare equal.
    """

    n: int
    fixed: tuple[int, ...]
    chains: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fixed = tuple(sorted(self.fixed))
        chains = tuple(sorted(tuple(chain) for chain in self.chains))
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "chains", chains)

        if any(not chain for chain in chains):
            raise ValueError("signature chains must be nonempty")
        used = list(fixed) + [i for chain in chains for i in chain]
        if sorted(used) != list(range(1, self.n + 1)):
            raise ValueError(f"J_V and the chains must partition 1..{self.n}, got {used}")

    @property
    def dimension(self) -> int:
        return len(self.chains)

    @property
    def codim(self) -> int:
        return self.n - self.dimension

    @property
    def heads(self) -> tuple[int, ...]:
        return tuple(chain[0] for chain in self.chains)

    @property
    def tails(self) -> tuple[int, ...]:
        return tuple(chain[-1] for chain in self.chains)

    @property
    def dominated(self) -> tuple[int, ...]:
        """Gamma: every coordinate except the chain tails."""
        tails = set(self.tails)
        return tuple(i for i in range(1, self.n + 1) if i not in tails)

    def predecessor(self, i: int) -> int | None:
        """The coordinate x_i is a function of, or None for chain heads and constants."""
        for chain in self.chains:
            if i in chain:
                position = chain.index(i)
                return chain[position - 1] if position else None
        return None

    def without(self, i: int) -> "Signature":
        """Signature on (P^1)^{n-1} after dropping coordinate i and renumbering the ones above it."""

        def shift(j: int) -> int:
            return j - 1 if j > i else j

        fixed = tuple(shift(j) for j in self.fixed if j != i)
        chains = tuple(tuple(shift(j) for j in chain if j != i) for chain in self.chains)
        return Signature(self.n - 1, fixed, tuple(chain for chain in chains if chain))

    def to_dict(self) -> dict:
        return {"n": self.n, "J_V": list(self.fixed), "chains": [list(chain) for chain in self.chains]}

    @classmethod
    def from_dict(cls, data: dict) -> "Signature":
        return cls(int(data["n"]), tuple(data.get("J_V", ())), tuple(tuple(c) for c in data["chains"]))

    def __str__(self) -> str:
        chains = " ".join("(" + ",".join(map(str, chain)) + ")" for chain in self.chains)
        return f"J_V={{{','.join(map(str, self.fixed))}}} {chains}".strip()


def canonical_signature(signature: Signature, reversible: Iterable[int] = ()) -> Signature:
    """Lexicographically smallest form, reversing the listed chains (those with only linear generators) when that helps."""
    chains = list(signature.chains)
    for index in reversible:
        chains[index] = min(chains[index], tuple(reversed(chains[index])))
    return Signature(signature.n, signature.fixed, tuple(chains))


def lah_number(m: int, k: int) -> int:
    """Ways to split m labelled items into k nonempty ordered lists."""
    if m == k == 0:
        return 1
    if m == 0 or k == 0 or k > m:
        return 0
    return math.comb(m - 1, k - 1) * math.factorial(m) // math.factorial(k)


def count_signatures(n: int, codim: int) -> int:
    k = n - codim
    return sum(math.comb(n, j) * lah_number(n - j, k) for j in range(n + 1))


def enumerate_signatures(n: int, codim: int) -> list[Signature]:
    """
    Every signature of a periodic subvariety of (P^1)^n with the given codimension.

    The result is duplicate-free and sorted by (J_V, chains).
    """
    if n < 1:
        raise ValueError("ambient dimension n must be at least 1")
    if not 0 <= codim <= n:
        raise ValueError(f"codimension must lie in 0..{n}, got {codim}")
    k = n - codim

    found = set()
    coordinates = range(1, n + 1)
    for size in range(n + 1):
        for fixed in itertools.combinations(coordinates, size):
            rest = [i for i in coordinates if i not in fixed]
            if k == 0:
                if not rest:
                    found.add(Signature(n, fixed, ()))
                continue
            if len(rest) < k:
                continue
            for blocks in multiset_partitions(rest, k):
                for ordering in itertools.product(*(itertools.permutations(block) for block in blocks)):
                    found.add(Signature(n, fixed, ordering))
    return sorted(found, key=lambda s: (len(s.fixed), s.fixed, s.chains))
