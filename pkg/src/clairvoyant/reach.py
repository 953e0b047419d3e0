"""Directed reachability from the origin through white lattice points.

Rows are swept bottom to top. Each row is a Python int used as a bitset
(bit ``i`` is column ``i``), so one row update costs O(W / wordsize).
Within a row, rightward spreading along runs of white cells is done with
a single carry-propagating addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import DomainError, SequenceExhausted
from .model import ColorSequence, LatticePath, LatticePoint, Step


@dataclass(frozen=True)
class ReachFrontier:
    row: int
    bits: int
    width: int

    def columns(self) -> list:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def __contains__(self, column: int) -> bool:
        return 0 <= column < self.width and (self.bits >> column) & 1 == 1

    @property
    def empty(self) -> bool:
        return self.bits == 0

    @property
    def rightmost(self) -> int:
        return self.bits.bit_length() - 1


@dataclass(frozen=True)
class Rectangle:
    """Columns ``[0, a]`` by rows ``[0, b]``, both inclusive."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise DomainError("rectangle bounds must be non-negative")


def spread_right(seeds: int, white: int) -> int:
    """Extend each seed rightward through its run of white bits.

    ``seeds`` must be a subset of ``white``. Adding the seeds to ``white``
    carries through every run from its lowest seed to the run's end; the
    XOR exposes the carried bits.
    """
    return (((white + seeds) ^ white) & white) | seeds


class WhiteRows:
    """White-cell bitsets for rows of a fixed-width window."""

    def __init__(self, X: ColorSequence, width: int):
        if width > len(X):
            raise SequenceExhausted(f"window width {width} exceeds X prefix {len(X)}")
        self.width = width
        self.full = (1 << width) - 1
        masks = [0] * X.m
        for i, c in enumerate(X.values[:width]):
            masks[c] |= 1 << i
        self._blocked_by_color = masks

    def row(self, color: int) -> int:
        return self.full ^ self._blocked_by_color[color]


def iter_reach_rows(X: ColorSequence, Y: ColorSequence, width: int, height: int) -> Iterator[ReachFrontier]:
    """Yield the reachable frontier for rows ``0..height-1``; O(width) memory."""
    if height > len(Y):
        raise SequenceExhausted(f"window height {height} exceeds Y prefix {len(Y)}")
    if width < 0 or height < 0:
        raise DomainError("window dimensions must be non-negative")
    white_rows = WhiteRows(X, width)
    prev = 0
    for j in range(height):
        white = white_rows.row(Y.values[j])
        seeds = (prev & white) if j else (white & 1)
        prev = spread_right(seeds, white) if seeds else 0
        yield ReachFrontier(j, prev, width)


def reach_rows(X: ColorSequence, Y: ColorSequence, width: int, height: int) -> list:
    return list(iter_reach_rows(X, Y, width, height))


def max_reach_distance(X: ColorSequence, Y: ColorSequence, bound: int) -> int:
    """Largest L1 distance in ``[0, bound]`` reached by a white path, or -1."""
    if bound < 0:
        raise DomainError("bound must be non-negative")
    best = -1
    for frontier in iter_reach_rows(X, Y, bound + 1, bound + 1):
        j = frontier.row
        if frontier.empty:
            break
        in_band = frontier.bits & ((1 << (bound - j + 1)) - 1)
        if in_band:
            best = max(best, in_band.bit_length() - 1 + j)
    return best


def percolates_to(X: ColorSequence, Y: ColorSequence, n: int) -> bool:
    return max_reach_distance(X, Y, n) == n


def escape_edges(X: ColorSequence, Y: ColorSequence, rect: Rectangle) -> tuple:
    """Which edges a white path from the origin can leave ``rect`` through.

    Returns ``(top, right)``: ``top`` when a reachable point of row ``b``
    has a white point directly above it, ``right`` when a reachable point
    of column ``a`` has a white point directly to its right.
    """
    if rect.a + 2 > len(X) or rect.b + 2 > len(Y):
        raise SequenceExhausted("prefixes do not cover the rectangle plus its outer rim")
    width = rect.a + 1
    white_rows = WhiteRows(X, width)
    right_col_color = X.values[rect.a + 1]
    corner_bit = 1 << rect.a
    right = False
    last = None
    for frontier in iter_reach_rows(X, Y, width, rect.b + 1):
        last = frontier
        if frontier.empty:
            return False, right
        if frontier.bits & corner_bit and right_col_color != Y.values[frontier.row]:
            right = True
    top = bool(last.bits & white_rows.row(Y.values[rect.b + 1]))
    return top, right


def escapes_rectangle(X: ColorSequence, Y: ColorSequence, rect: Rectangle) -> bool:
    top, right = escape_edges(X, Y, rect)
    return top or right


def witness_path(frontiers: list, target: LatticePoint) -> Optional[LatticePath]:
    """Backtrack a white path from the origin to ``target`` through stored frontiers."""
    i, j = target.i, target.j
    if j >= len(frontiers) or i not in frontiers[j]:
        return None
    steps = []
    while (i, j) != (0, 0):
        if i > 0 and (i - 1) in frontiers[j]:
            steps.append(Step.RIGHT)
            i -= 1
        else:
            steps.append(Step.UP)
            j -= 1
    return LatticePath(tuple(reversed(steps)))
