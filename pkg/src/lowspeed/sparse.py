"""The sparse set S = {0^(2^n)} and prefixes of its subsets.

Under the length-lex numbering the string 0^(2^n) sits at index
2^(2^n) - 1, so a prefix of a subset of S may carry 1-bits only at
positions 1, 3, 15, 255, 65535, ...  A length-t prefix therefore has at
most about log log t free bits, and the family of all of them is tiny.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .machine import Generated


def _sparse_position(n: int) -> int:
    return (1 << (1 << n)) - 1


def sparse_positions(t: int) -> list[int]:
    """Positions ``2**(2**n) - 1`` strictly below ``t``, ascending."""
    out = []
    n = 0
    while (p := _sparse_position(n)) < t:
        out.append(p)
        n += 1
    return out


def is_position_sparse(p: int) -> bool:
    m = p + 1
    if m & (m - 1):
        return False
    k = m.bit_length() - 1
    return k > 0 and not (k & (k - 1))


@dataclass(frozen=True)
class SparsePrefix:
    """A prefix stored as its length and the set of 1-positions.

    Works as an oracle view: positions below ``length`` are answered,
    anything beyond is unresolved.  Lengths may be astronomically large.
    """

    length: int
    ones: frozenset[int] = frozenset()

    def __post_init__(self):
        for p in self.ones:
            if not (0 <= p < self.length and is_position_sparse(p)):
                raise ValueError(f"position {p} cannot carry a 1 in a sparse prefix of length {self.length}")

    @classmethod
    def from_bits(cls, bits: str) -> "SparsePrefix":
        if not is_sparse_prefix(bits):
            raise ValueError(f"{bits!r} is not a sparse prefix")
        return cls(len(bits), frozenset(i for i, b in enumerate(bits) if b == "1"))

    @property
    def bits(self) -> str:
        out = ["0"] * self.length
        for p in self.ones:
            out[p] = "1"
        return "".join(out)

    def __len__(self):
        return self.length

    def __str__(self):
        return self.bits

    def query(self, index: int) -> bool | None:
        if index < self.length:
            return index in self.ones
        return None

    def extends(self, other: "SparsePrefix") -> bool:
        return other.length <= self.length and {p for p in self.ones if p < other.length} == set(other.ones)

    def extend_zero(self) -> "SparsePrefix":
        return SparsePrefix(self.length + 1, self.ones)


def is_sparse_prefix(sigma: str) -> bool:
    return all(b == "0" or (b == "1" and is_position_sparse(i)) for i, b in enumerate(sigma))


def enumerate_sparse_prefixes(t: int, base: SparsePrefix | str = "") -> list[SparsePrefix]:
    """All sparse prefixes of length ``t`` extending ``base``, in lexicographic order."""
    if isinstance(base, str):
        base = SparsePrefix.from_bits(base)
    if base.length > t:
        raise ValueError(f"base of length {base.length} is longer than {t}")
    free = [p for p in sparse_positions(t) if p >= base.length]
    k = len(free)
    out = []
    for mask in range(1 << k):
        # free[0] is the most significant choice, so counting up is lex order
        chosen = {free[j] for j in range(k) if mask >> (k - 1 - j) & 1}
        out.append(SparsePrefix(t, base.ones | chosen))
    return out


def count_sparse_prefixes(t: int, base: SparsePrefix | str = "") -> int:
    if isinstance(base, str):
        base = SparsePrefix.from_bits(base)
    return 1 << sum(1 for p in sparse_positions(t) if p >= base.length)


def sparse_oracle_from_G(G: Callable[[int], bool] | Iterable[int]) -> Generated:
    """The oracle S_G = {0^(2^n) : n in G} as a generated view."""
    member = G if callable(G) else frozenset(G).__contains__

    def rule(index: int) -> bool:
        if not is_position_sparse(index):
            return False
        n = ((index + 1).bit_length() - 1).bit_length() - 1
        return bool(member(n))

    return Generated(rule)


def sparse_extension_rule(base: SparsePrefix, G: Callable[[int], bool]) -> Generated:
    """An element of the sparse class extending ``base``: base below its length, S_G above."""
    tail = sparse_oracle_from_G(G)

    def rule(index: int) -> bool:
        if index < base.length:
            return index in base.ones
        return tail.query(index)

    return Generated(rule)
