"""Small helpers for subsets-as-bitmasks.

Ground sets are {0, ..., n-1} and subsets are Python ints with bit i set
when element i is present.  Everything downstream (matroids, set families,
signatures) speaks this encoding.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_from(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def subset_masks(n: int, size: int) -> list[int]:
    """All size-subsets of {0..n-1} as masks, sorted ascending by value."""
    out = [mask_from(c) for c in combinations(range(n), size)]
    out.sort()
    return out
