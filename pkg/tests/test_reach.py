import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clairvoyant.errors import SequenceExhausted
from clairvoyant.model import ColorSequence, LatticePoint, exists_schedule_bruteforce, is_white
from clairvoyant.reach import (
    Rectangle,
    escape_edges,
    escapes_rectangle,
    max_reach_distance,
    percolates_to,
    reach_rows,
    spread_right,
    witness_path,
)


def reachable_by_search(X, Y, width, height):
    """Independent oracle: explicit graph search over white points."""
    if not is_white(X, Y, LatticePoint(0, 0)):
        return set()
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        i, j = stack.pop()
        for a, b in ((i + 1, j), (i, j + 1)):
            if a < width and b < height and (a, b) not in seen and X[a] != Y[b]:
                seen.add((a, b))
                stack.append((a, b))
    return seen


def as_set(frontiers):
    return {(i, f.row) for f in frontiers for i in f.columns()}


def instances(max_m=4, max_len=14):
    return st.integers(1, max_m).flatmap(
        lambda m: st.tuples(
            st.just(m),
            st.lists(st.integers(0, m - 1), min_size=1, max_size=max_len),
            st.lists(st.integers(0, m - 1), min_size=1, max_size=max_len),
        )
    )


def test_all_white_window():
    X = ColorSequence(2, (0, 0))
    Y = ColorSequence(2, (1, 1))
    assert as_set(reach_rows(X, Y, 2, 2)) == {(0, 0), (1, 0), (0, 1), (1, 1)}


def test_origin_blocked():
    X = ColorSequence(3, (1, 0, 2))
    Y = ColorSequence(3, (1, 2, 0))
    assert all(f.empty for f in reach_rows(X, Y, 3, 3))
    assert max_reach_distance(X, Y, 2) == -1
    assert not percolates_to(X, Y, 0)
    assert not escapes_rectangle(X, Y, Rectangle(1, 1))


def test_crossed_instance():
    # (1,0) and (0,1) are blocked, so only the origin is reachable
    X = ColorSequence(2, (0, 1, 0))
    Y = ColorSequence(2, (1, 0, 1))
    assert as_set(reach_rows(X, Y, 2, 2)) == {(0, 0)} == reachable_by_search(X, Y, 2, 2)
    assert max_reach_distance(X, Y, 2) == 0


def test_all_white_staircase():
    X = ColorSequence(2, (0,) * 8)
    Y = ColorSequence(2, (1,) * 8)
    assert max_reach_distance(X, Y, 7) == 7
    assert percolates_to(X, Y, 5)
    assert escapes_rectangle(X, Y, Rectangle(0, 0))


def test_window_exceeds_prefix():
    X = ColorSequence(2, (0, 1))
    Y = ColorSequence(2, (1, 0))
    with pytest.raises(SequenceExhausted):
        reach_rows(X, Y, 3, 2)
    with pytest.raises(SequenceExhausted):
        max_reach_distance(X, Y, 2)


def test_spread_right_runs():
    white = 0b1101111
    assert spread_right(0b0000101, white) == 0b0001111
    assert spread_right(0b0100000, white) == 0b1100000
    assert spread_right(0, white) == 0


@settings(max_examples=300)
@given(instances())
def test_sweep_matches_graph_search(inst):
    m, xs, ys = inst
    X, Y = ColorSequence(m, xs), ColorSequence(m, ys)
    got = as_set(reach_rows(X, Y, len(xs), len(ys)))
    assert got == reachable_by_search(X, Y, len(xs), len(ys))


@settings(max_examples=200)
@given(instances(), st.data())
def test_subwindow_monotonicity(inst, data):
    m, xs, ys = inst
    X, Y = ColorSequence(m, xs), ColorSequence(m, ys)
    w = data.draw(st.integers(1, len(xs)))
    h = data.draw(st.integers(1, len(ys)))
    full = as_set(reach_rows(X, Y, len(xs), len(ys)))
    sub = as_set(reach_rows(X, Y, w, h))
    assert sub == {(i, j) for i, j in full if i < w and j < h}


def test_percolation_matches_bruteforce():
    rng = random.Random(11)
    for _ in range(300):
        m = rng.choice((2, 3, 4))
        n = rng.randint(0, 9)
        X = ColorSequence(m, [rng.randrange(m) for _ in range(n + 1)])
        Y = ColorSequence(m, [rng.randrange(m) for _ in range(n + 1)])
        assert percolates_to(X, Y, n) == exists_schedule_bruteforce(X, Y, n)


def _blocked(xs, ys, N):
    return {(a, b) for a in range(N + 1) for b in range(N + 1) if xs[a] == ys[b]}


def test_more_blocking_never_increases_reach():
    rng = random.Random(5)
    checked = 0
    while checked < 300:
        m = rng.choice((2, 3, 4))
        N = rng.randint(1, 12)
        xs = [rng.randrange(m) for _ in range(N + 1)]
        ys = [rng.randrange(m) for _ in range(N + 1)]
        xs2, ys2 = list(xs), list(ys)
        target = xs2 if rng.random() < 0.5 else ys2
        target[rng.randrange(N + 1)] = rng.randrange(m)
        before_set, after_set = _blocked(xs, ys, N), _blocked(xs2, ys2, N)
        if not before_set < after_set:
            continue
        checked += 1
        before = max_reach_distance(ColorSequence(m, xs), ColorSequence(m, ys), N)
        after = max_reach_distance(ColorSequence(m, xs2), ColorSequence(m, ys2), N)
        assert after <= before


def _escape_oracle(X, Y, a, b):
    inside = reachable_by_search(X, Y, a + 1, b + 1)
    top = any(j == b and X[i] != Y[b + 1] for i, j in inside)
    right = any(i == a and X[a + 1] != Y[j] for i, j in inside)
    return top, right


@settings(max_examples=300)
@given(instances(max_len=10), st.data())
def test_escape_matches_oracle(inst, data):
    m, xs, ys = inst
    if len(xs) < 2 or len(ys) < 2:
        return
    X, Y = ColorSequence(m, xs), ColorSequence(m, ys)
    a = data.draw(st.integers(0, len(xs) - 2))
    b = data.draw(st.integers(0, len(ys) - 2))
    assert escape_edges(X, Y, Rectangle(a, b)) == _escape_oracle(X, Y, a, b)


def test_blocked_ring_stops_escape():
    # inside the 3x3 rectangle every point is white; column 3 shares the
    # colour of rows 0..2 and row 3 shares the colour of columns 0..2
    X = ColorSequence(2, (0, 0, 0, 1))
    Y = ColorSequence(2, (1, 1, 1, 0))
    rect = Rectangle(2, 2)
    assert escape_edges(X, Y, rect) == (False, False)
    frontiers = reach_rows(X, Y, 4, 4)
    assert not any(f.row == 3 and not f.empty for f in frontiers)
    assert not any(3 in f for f in frontiers)
    assert as_set(frontiers) == {(i, j) for i in range(3) for j in range(3)}


def test_escape_needs_rim():
    X = ColorSequence(2, (0, 0))
    Y = ColorSequence(2, (1,))
    with pytest.raises(SequenceExhausted):
        escapes_rectangle(X, Y, Rectangle(0, 0))


def test_witness_path_is_white():
    rng = random.Random(3)
    for _ in range(100):
        m = 3
        xs = [rng.randrange(m) for _ in range(8)]
        ys = [rng.randrange(m) for _ in range(8)]
        X, Y = ColorSequence(m, xs), ColorSequence(m, ys)
        frontiers = reach_rows(X, Y, 8, 8)
        for i, j in as_set(frontiers):
            path = witness_path(frontiers, LatticePoint(i, j))
            assert path.end == LatticePoint(i, j)
            assert all(is_white(X, Y, p) for p in path.points())
        assert witness_path(frontiers, LatticePoint(0, 9)) is None
