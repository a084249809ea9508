"""Multi-indices, primitive vectors and degree counting.

Multi-indices are plain tuples of nonnegative ints. Every enumeration in
the package uses graded lexicographic order: by total degree first, then
lexicographically ascending within a degree, so ``(0, 1)`` precedes
``(1, 0)``.
"""
from __future__ import annotations

from functools import lru_cache, reduce
from math import comb, gcd
from typing import Iterator, Sequence

MultiIndex = tuple[int, ...]


def as_index(entries: Sequence[int]) -> MultiIndex:
    """Validate and normalize a multi-index."""
    idx = tuple(int(e) for e in entries)
    if not idx:
        raise ValueError("multi-index must have at least one entry")
    if any(e < 0 for e in idx):
        raise ValueError(f"negative entry in multi-index {idx}")
    return idx


def degree(m: Sequence[int]) -> int:
    return sum(m)


def zero(n: int) -> MultiIndex:
    return (0,) * n


def unit(n: int, j: int) -> MultiIndex:
    """The j-th unit vector (0-based)."""
    return tuple(1 if i == j else 0 for i in range(n))


def add(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def scale(k: Sequence[int], l: int) -> MultiIndex:
    return tuple(l * x for x in k)


def content(m: Sequence[int]) -> int:
    """gcd of the entries, with gcd(0, a) = a."""
    return reduce(gcd, m, 0)


def is_primitive(m: Sequence[int]) -> bool:
    return content(m) == 1


def grlex_key(m: Sequence[int]) -> tuple:
    return (sum(m), tuple(m))


def primitive_factor(m: Sequence[int]) -> tuple[MultiIndex, int]:
    """Split a nonzero multi-index as ``m = l * k`` with ``k`` primitive.

    >>> primitive_factor((2, 4))
    ((1, 2), 2)
    >>> primitive_factor((0, 6))
    ((0, 1), 6)
    """
    m = as_index(m)
    g = content(m)
    if g == 0:
        raise ValueError("no primitive factorization of 0")
    return tuple(x // g for x in m), g


def indices_of_degree(n: int, d: int) -> Iterator[MultiIndex]:
    """All multi-indices of length n and total degree d, lex ascending."""
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in indices_of_degree(n - 1, d - first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def indices_up_to(n: int, d: int) -> tuple[MultiIndex, ...]:
    """All multi-indices with |m| <= d in graded-lex order."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return tuple(m for k in range(d + 1) for m in indices_of_degree(n, k))


@lru_cache(maxsize=256)
def enumerate_primitives(n: int, N: int) -> tuple[MultiIndex, ...]:
    """Primitive multi-indices with ``1 <= |k| <= N`` in graded-lex order."""
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    return tuple(
        k for d in range(1, N + 1) for k in indices_of_degree(n, d) if is_primitive(k)
    )


def count_degree(n: int, m: int) -> int:
    """Number of multi-indices of length n and degree m."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    return comb(n + m - 1, n - 1)


def is_multiple_of(m: Sequence[int], k: Sequence[int]) -> bool:
    """True when ``m = l * k`` for some integer ``l >= 1``."""
    if not any(m):
        return False
    return primitive_factor(m)[0] == tuple(k)
