"""Barrier geometry for packed occurrences and a finite-window blocking checker.

When E and F hold, each of the first ``n`` occurrences of the basic run in
X, combined with the ``k`` reversed copies in Y, pins down ``k`` stacked
anti-diagonals of blocked points. The checker does not trust that
argument: it runs the frontier sweep over a window whose top row sits
just above the barrier band and reports what it sees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import PreconditionFailed, SequenceExhausted, WideningExhausted
from .model import ColorSequence, LatticePath, LatticePoint, is_white
from .patterns import find_occurrences, holds_E, holds_F
from .reach import iter_reach_rows, reach_rows, witness_path

MAX_WIDENING = 16


class VerdictKind(str, enum.Enum):
    BLOCKED = "BLOCKED"
    TOP_ESCAPE = "TOP_ESCAPE"
    RIGHT_EDGE_INCONCLUSIVE = "RIGHT_EDGE_INCONCLUSIVE"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    width: int
    height: int
    witness: Optional[LatticePath] = None

    @property
    def blocked(self) -> bool:
        return self.kind is VerdictKind.BLOCKED

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "width": self.width, "height": self.height}
        if self.witness is not None:
            out["witness"] = "".join(s.value for s in self.witness.steps)
        return out


@dataclass(frozen=True)
class Barrier:
    p: int
    q: int
    points: tuple


def barrier_points(tau_p: int, q: int, n: int, m: int) -> list:
    """The ``m`` points ``(tau_p + j, n + (q + 1) * m - j - 2)``, ordered by ``j``."""
    top = n + (q + 1) * m - 2
    return [LatticePoint(tau_p + j, top - j) for j in range(m)]


@dataclass
class BlockingCertificate:
    m: int
    n: int
    k: int
    taus: tuple
    barriers: list = field(default_factory=list)
    verdict: Optional[Verdict] = None

    @property
    def band(self) -> tuple:
        """Inclusive row range covered by the barrier stacks."""
        return self.n - 1, self.n + self.k * self.m - 2

    @property
    def height(self) -> int:
        return self.n + self.k * self.m

    @property
    def initial_width(self) -> int:
        return self.taus[self.n] + self.m + self.k

    def to_dict(self) -> dict:
        window = None
        if self.verdict is not None:
            window = {"width": self.verdict.width, "height": self.verdict.height}
        return {
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "tau": list(self.taus),
            "barriers": [
                {"p": b.p, "q": b.q, "points": [[pt.i, pt.j] for pt in b.points]}
                for b in self.barriers
            ],
            "verdict": None if self.verdict is None else self.verdict.kind.value,
            "window": window,
        }


def _require_events(X: ColorSequence, Y: ColorSequence, n: int, k: int, table=None):
    try:
        e = holds_E(Y, n, k)
    except SequenceExhausted as exc:
        raise PreconditionFailed(f"event E undecidable on this prefix: {exc}") from exc
    if not e:
        raise PreconditionFailed("event E does not hold")
    if not holds_F(X, n, k, table):
        raise PreconditionFailed("event F does not hold")


def build_certificate(X: ColorSequence, Y: ColorSequence, n: int, k: int) -> BlockingCertificate:
    table = find_occurrences(X, max_count=n + 1)
    _require_events(X, Y, n, k, table)
    m = X.m
    barriers = [
        Barrier(p, q, tuple(barrier_points(table.tau(p), q, n, m)))
        for p in range(1, n + 1)
        for q in range(k)
    ]
    return BlockingCertificate(m, n, k, table.taus, barriers)


def verify_barriers_blocked(X: ColorSequence, Y: ColorSequence, cert: BlockingCertificate) -> bool:
    _require_events(X, Y, cert.n, cert.k)
    for barrier in cert.barriers:
        for pt in barrier.points:
            if pt.i >= len(X) or pt.j >= len(Y):
                raise SequenceExhausted(f"barrier point ({pt.i}, {pt.j}) outside prefixes")
            if is_white(X, Y, pt):
                return False
    return True


def verify_blocking(X: ColorSequence, Y: ColorSequence, n: int, k: int, initial_W: int) -> Verdict:
    """Sweep the window ``[0, W) x [0, n + k*m)`` once and classify the result."""
    _require_events(X, Y, n, k)
    width, height = initial_W, n + k * X.m
    edge_bit = 1 << (width - 1)
    touched_edge = False
    last = None
    for frontier in iter_reach_rows(X, Y, width, height):
        last = frontier
        if frontier.empty:
            break
        if frontier.bits & edge_bit and frontier.row < height - 1:
            touched_edge = True
    if last is not None and last.row == height - 1 and not last.empty:
        frontiers = reach_rows(X, Y, width, height)
        target = LatticePoint(frontiers[-1].columns()[0], height - 1)
        return Verdict(VerdictKind.TOP_ESCAPE, width, height, witness_path(frontiers, target))
    if touched_edge:
        return Verdict(VerdictKind.RIGHT_EDGE_INCONCLUSIVE, width, height)
    return Verdict(VerdictKind.BLOCKED, width, height)


def verify_with_widening(X: ColorSequence, Y: ColorSequence, n: int, k: int,
                         initial_W: Optional[int] = None, cap: int = MAX_WIDENING) -> Verdict:
    """Retry ``verify_blocking`` with doubled widths up to ``cap`` times the start.

    The default start is ``tau_{n+1} + m + k``.
    """
    if initial_W is None:
        table = find_occurrences(X, max_count=n + 1)
        initial_W = table.tau(n + 1) + X.m + k
    width = initial_W
    while True:
        verdict = verify_blocking(X, Y, n, k, width)
        if verdict.kind is not VerdictKind.RIGHT_EDGE_INCONCLUSIVE:
            return verdict
        if width * 2 > initial_W * cap:
            raise WideningExhausted(
                f"still inconclusive at width {width} (cap {cap}x{initial_W})", verdict
            )
        width *= 2


def certify(X: ColorSequence, Y: ColorSequence, n: int, k: int) -> BlockingCertificate:
    """Build the certificate and attach the widened verdict."""
    cert = build_certificate(X, Y, n, k)
    cert.verdict = verify_with_widening(X, Y, n, k, cert.initial_width)
    return cert
