"""Young diagrams (integer partitions) indexing Virasoro descendants.

The enumeration order of :func:`young_diagrams` is reverse-lexicographic
and doubles as the row/column order of every level-N matrix in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

__all__ = ["YoungDiagram", "young_diagrams", "partition_count"]


@dataclass(frozen=True, order=False)
class YoungDiagram:
    """A non-increasing tuple of positive parts; ``length`` is the sum of the parts."""

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive integers, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def length(self) -> int:
        return sum(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return ",".join(str(p) for p in self.parts)

    @classmethod
    def parse(cls, text: str) -> "YoungDiagram":
        """Inverse of ``str``: ``"2,1,1"`` -> ``YoungDiagram((2, 1, 1))``; ``""`` is the empty diagram."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(p) for p in text.split(",")))


def _partitions(n: int, max_part: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def young_diagrams(N: int) -> tuple:
    """All Young diagrams with ``length == N`` in reverse-lexicographic order."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return tuple(YoungDiagram(p) for p in _partitions(N, N))


@lru_cache(maxsize=None)
def partition_count(N: int) -> int:
    """Number of partitions p(N), by the coin-change recurrence over part sizes."""
    if N < 0:
        raise ValueError("N must be non-negative")
    ways = [1] + [0] * N
    for part in range(1, N + 1):
        for total in range(part, N + 1):
            ways[total] += ways[total - part]
    return ways[N]
