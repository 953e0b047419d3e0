"""Occurrences of the basic color run and the blocking events built on them.

``basic_sequence(m)`` is ``(0, 1, ..., m-1)``. Event E asks that the row
sequence Y carry ``k`` back-to-back reversed copies starting at index
``n - 1``; event F asks that the first ``n + 1`` copies of the basic run in
the column sequence X be packed with gaps of at most ``k - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InsufficientOccurrences, SequenceExhausted
from .model import ColorSequence


def basic_sequence(m: int) -> ColorSequence:
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return ColorSequence(m, tuple(range(m)))


def reversed_basic(m: int) -> ColorSequence:
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return ColorSequence(m, tuple(range(m - 1, -1, -1)))


@dataclass(frozen=True)
class OccurrenceTable:
    m: int
    taus: tuple
    scanned_length: int

    def __len__(self) -> int:
        return len(self.taus)

    def tau(self, i: int) -> int:
        """1-based access matching the usual tau_1, tau_2, ... numbering."""
        if not 1 <= i <= len(self.taus):
            raise InsufficientOccurrences(f"tau_{i} not found; table holds {len(self.taus)}")
        return self.taus[i - 1]

    @property
    def last_start(self) -> int:
        """Last start position whose whole window fits in the scanned prefix."""
        return self.scanned_length - self.m

    def spacing_ok(self) -> bool:
        return all(b - a >= self.m for a, b in zip(self.taus, self.taus[1:]))


def find_occurrences(X: ColorSequence, max_count=None) -> OccurrenceTable:
    """Start indices of ``(0, 1, ..., m-1)`` in X, ascending."""
    m = X.m
    values = X.values
    taus = []
    run = 0  # length of the basic-run prefix ending at the current index
    for idx, v in enumerate(values):
        if v == run:
            run += 1
        elif v == 0:
            run = 1
        else:
            run = 0
        if run == m:
            taus.append(idx - m + 1)
            run = 0
            if max_count is not None and len(taus) >= max_count:
                break
    return OccurrenceTable(m, tuple(taus), len(values))


def holds_E(Y: ColorSequence, n: int, k: int) -> bool:
    if n < 1:
        raise DomainError("n must be >= 1")
    m = Y.m
    if k <= 0:
        return True
    last = n + k * m - 2
    if last >= len(Y):
        raise SequenceExhausted(f"event E needs Y up to index {last}, prefix has {len(Y)}")
    block = Y.values[n - 1:last + 1]
    return block == tuple(range(m - 1, -1, -1)) * k


def holds_F(X: ColorSequence, n: int, k: int, table: OccurrenceTable | None = None) -> bool:
    """Whether the first ``n + 1`` occurrences are packed with gaps ``<= k - 1``.

    Returns False as soon as the prefix already proves a violation, even if
    fewer than ``n + 1`` occurrences were found. Raises
    InsufficientOccurrences only when the prefix cannot decide.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    m = X.m
    if table is None:
        table = find_occurrences(X, max_count=n + 1)
    taus = table.taus
    # Latest admissible start of the next occurrence.
    bound = k - 1
    for idx in range(n + 1):
        if idx < len(taus):
            if taus[idx] > bound:
                return False
            bound = taus[idx] + m + k - 1
        elif table.last_start >= bound:
            return False
        else:
            raise InsufficientOccurrences(
                f"found {len(taus)} of {n + 1} occurrences in a prefix of {len(X)}"
            )
    return True


def choose_k(s: float, n: int, m: int) -> int:
    """Stack height that pushes the F failure bound below ``n**-s``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    if m < 1 or s <= 0:
        raise DomainError("need m >= 1 and s > 0")
    p1 = base_probability(m)
    return math.ceil((s + 1) * m * math.log(n) / p1)


def base_probability(m: int) -> float:
    """Chance that a fixed window of X equals the basic run: ``m**-m``."""
    if m < 1:
        raise DomainError("m must be >= 1")
    return float(m) ** (-m)


def prob_E_exact(m: int, k: int) -> float:
    if k < 0:
        raise DomainError("k must be >= 0")
    return base_probability(m) ** k


def prob_F_lower(m: int, n: int, k: int) -> float:
    if n < 1 or k < 0:
        raise DomainError("need n >= 1 and k >= 0")
    p1 = base_probability(m)
    return max(0.0, 1.0 - n * math.exp(-p1 * k / m))


@dataclass(frozen=True)
class AnalyticBounds:
    m: int
    p1: float
    alpha: float

    @classmethod
    def for_m(cls, m: int) -> "AnalyticBounds":
        p1 = base_probability(m)
        return cls(m, p1, -m * math.log(p1) / p1)

    def prob_E_floor(self, n: int, s: float) -> float:
        """``p1 * n**(-alpha * (s + 1))``."""
        return self.p1 * n ** (-self.alpha * (s + 1))

    def log_prob_E_floor(self, n: int, s: float) -> float:
        return math.log(self.p1) - self.alpha * (s + 1) * math.log(n)
