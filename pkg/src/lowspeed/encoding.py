"""Global numbering conventions.

Binary strings are identified with naturals in length-lexicographic order
(the empty string is 0, "0" is 1, "1" is 2, "00" is 3, ...). Pairs use the
Cantor pairing ``(a+b)(a+b+1)/2 + b`` and triples nest to the right.
All arithmetic is on Python ints, so nothing overflows.
"""

from __future__ import annotations

from math import isqrt


def word_to_index(x: str) -> int:
    """Position of ``x`` in length-lex order: ``2**len(x) - 1 + int(x, 2)``."""
    if x and x.strip("01"):
        raise ValueError(f"not a binary string: {x!r}")
    return (1 << len(x)) - 1 + (int(x, 2) if x else 0)


def index_to_word(n: int) -> str:
    if n < 0:
        raise ValueError(f"negative index {n}")
    m = (n + 1).bit_length() - 1
    if m == 0:
        return ""
    return format(n + 1 - (1 << m), f"0{m}b")


def word_length(n: int) -> int:
    """Length of the string with index ``n`` without materialising it."""
    return (n + 1).bit_length() - 1


def pair(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise ValueError("pair() takes naturals")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(p: int) -> tuple[int, int]:
    if p < 0:
        raise ValueError("unpair() takes a natural")
    # largest w with w(w+1)/2 <= p
    w = (isqrt(8 * p + 1) - 1) // 2
    b = p - w * (w + 1) // 2
    return w - b, b


def triple(a: int, b: int, c: int) -> int:
    return pair(a, pair(b, c))


def untriple(t: int) -> tuple[int, int, int]:
    a, bc = unpair(t)
    b, c = unpair(bc)
    return a, b, c


def proj3(i: int, t: int) -> int:
    """The ``i``-th component (1-based) of a triple code."""
    if i not in (1, 2, 3):
        raise ValueError(f"projection index must be 1, 2 or 3, got {i}")
    return untriple(t)[i - 1]


def words_of_length(n: int):
    """All binary strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ""
        return
    for v in range(1 << n):
        yield format(v, f"0{n}b")
