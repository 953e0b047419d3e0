"""Color sequences, delay schedules and their lattice-path picture.

A delay schedule ``u`` interleaves two walks: bit 1 advances the X walk
(a Right step on the lattice), bit 0 advances the Y walk (an Up step).
After ``n`` steps the walks sit at ``X[s_n]`` and ``Y[n - s_n]`` where
``s_n`` counts the ones among the first ``n`` bits, so a schedule is
collision free exactly when its lattice path visits only white points.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import DomainError, OracleLimitExceeded, SequenceExhausted

BRUTEFORCE_MAX_HORIZON = 20


@dataclass(frozen=True)
class ColorSequence:
    """Finite prefix of a color stream over ``{0, ..., m-1}``."""

    m: int
    values: tuple

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"alphabet size must be >= 1, got {self.m}")
        values = tuple(int(v) for v in self.values)
        for v in values:
            if not 0 <= v < self.m:
                raise DomainError(f"color {v} outside [0, {self.m - 1}]")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    @property
    def length(self) -> int:
        return len(self.values)

    def at(self, index: int) -> int:
        """Bounds-checked read; never wraps around on negative indices."""
        if not 0 <= index < len(self.values):
            raise SequenceExhausted(
                f"index {index} outside prefix of length {len(self.values)}"
            )
        return self.values[index]

    def replace(self, start: int, block: Sequence[int]) -> "ColorSequence":
        end = start + len(block)
        if start < 0 or end > len(self.values):
            raise SequenceExhausted(
                f"block [{start}, {end}) outside prefix of length {len(self.values)}"
            )
        return ColorSequence(self.m, self.values[:start] + tuple(block) + self.values[end:])


@dataclass(frozen=True)
class DelaySequence:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise DomainError("delay bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index):
        return self.bits[index]

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)


class Step(enum.Enum):
    RIGHT = "R"
    UP = "U"


@dataclass(frozen=True, order=True)
class LatticePoint:
    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise DomainError(f"lattice coordinates must be non-negative: ({self.i}, {self.j})")

    def distance(self, other: "LatticePoint") -> int:
        """L1 distance."""
        return abs(other.i - self.i) + abs(other.j - self.j)


@dataclass(frozen=True)
class LatticePath:
    """Right/Up path starting at the origin."""

    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(Step(s) for s in self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def points(self) -> list:
        i = j = 0
        out = [LatticePoint(0, 0)]
        for step in self.steps:
            if step is Step.RIGHT:
                i += 1
            else:
                j += 1
            out.append(LatticePoint(i, j))
        return out

    @property
    def end(self) -> LatticePoint:
        rights = sum(1 for s in self.steps if s is Step.RIGHT)
        return LatticePoint(rights, len(self.steps) - rights)


def _as_delay(u) -> DelaySequence:
    return u if isinstance(u, DelaySequence) else DelaySequence(tuple(u))


def partial_sum(u, n: int) -> int:
    """Number of ones among ``u[0..n-1]``."""
    u = _as_delay(u)
    if not 0 <= n <= len(u):
        raise IndexError(f"step {n} outside [0, {len(u)}]")
    return sum(u.bits[:n])


def delayed_value(x: ColorSequence, u, n: int) -> int:
    s = partial_sum(u, n)
    return x.at(s)


def complement(u) -> DelaySequence:
    return DelaySequence(tuple(1 - b for b in _as_delay(u)))


def collision_time(x: ColorSequence, y: ColorSequence, u, horizon: int) -> Optional[int]:
    """First step ``n`` in ``[0, horizon]`` where the two delayed walks meet.

    Returns None when the schedule keeps them apart through the horizon.
    """
    u = _as_delay(u)
    if not 0 <= horizon <= len(u):
        raise IndexError(f"horizon {horizon} outside [0, {len(u)}]")
    s = 0
    for n in range(horizon + 1):
        if x.at(s) == y.at(n - s):
            return n
        if n < horizon:
            s += u.bits[n]
    return None


def is_white(X: ColorSequence, Y: ColorSequence, p: LatticePoint) -> bool:
    if not (0 <= p.i < len(X) and 0 <= p.j < len(Y)):
        raise IndexError(f"point ({p.i}, {p.j}) outside {len(X)}x{len(Y)} prefix window")
    return X.values[p.i] != Y.values[p.j]


def path_to_delay(path: LatticePath) -> DelaySequence:
    return DelaySequence(tuple(1 if s is Step.RIGHT else 0 for s in path.steps))


def delay_to_path(u) -> LatticePath:
    return LatticePath(tuple(Step.RIGHT if b else Step.UP for b in _as_delay(u)))


def schedule_points(u) -> Iterable[LatticePoint]:
    """Points ``(s_n, n - s_n)`` for ``n = 0..len(u)``."""
    return delay_to_path(u).points()


def exists_schedule_bruteforce(x: ColorSequence, y: ColorSequence, horizon: int) -> bool:
    """Search all ``2**horizon`` schedules for one that never collides.

    Deliberately naive: it is the oracle the frontier sweep is checked against.
    """
    if horizon > BRUTEFORCE_MAX_HORIZON:
        raise OracleLimitExceeded(
            f"horizon {horizon} exceeds brute-force limit {BRUTEFORCE_MAX_HORIZON}"
        )
    if horizon < 0:
        raise DomainError("horizon must be non-negative")
    if len(x) <= horizon or len(y) <= horizon:
        raise SequenceExhausted(
            f"prefixes of length {len(x)}, {len(y)} cannot cover horizon {horizon}"
        )
    for bits in itertools.product((0, 1), repeat=horizon):
        if collision_time(x, y, DelaySequence(bits), horizon) is None:
            return True
    return False


def format_sequence(seq: ColorSequence) -> str:
    return f"m={seq.m}\n" + " ".join(str(v) for v in seq.values) + "\n"


def parse_sequence(text: str) -> ColorSequence:
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("m="):
        raise ValueError("sequence file must start with a line 'm=<int>'")
    m = int(lines[0].strip()[2:])
    body = " ".join(lines[1:]).split()
    return ColorSequence(m, tuple(int(v) for v in body))


def read_sequence(path) -> ColorSequence:
    with open(path, encoding="utf-8") as fh:
        return parse_sequence(fh.read())


def write_sequence(path, seq: ColorSequence) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_sequence(seq))
