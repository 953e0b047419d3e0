"""Seeded Monte Carlo estimates, event planting and tail fitting.

Every trial draws its sequences from streams keyed by
``(master_seed, trial_index, role)`` so a trial's outcome never depends on
which worker ran it or in what order. Workers only return integer counts,
and counts are summed, so any thread count gives identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateFit, DomainError, InsufficientOccurrences
from .model import ColorSequence
from .patterns import choose_k, find_occurrences, holds_E, holds_F, reversed_basic
from .reach import Rectangle, escape_edges, max_reach_distance

ROLE_X, ROLE_Y, ROLE_AUX = 0, 1, 2
Z95 = NormalDist().inv_cdf(0.975)
TAIL_PROXY_CAVEAT = (
    "'not to infinity' is approximated by 'not to distance N'; "
    "the true event is not decidable on a finite window"
)


# -- randomness ---------------------------------------------------------------

def trial_rng(master_seed: int, trial: int, role: int = 0) -> np.random.Generator:
    """Independent generator for one role of one trial."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial), int(role)))
    return np.random.default_rng(seq)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed)))


def sample_sequence(m: int, length: int, seed) -> ColorSequence:
    """I.i.d. uniform colors; ``seed`` is an int or a numpy Generator."""
    if m < 1:
        raise DomainError("m must be >= 1")
    values = _as_rng(seed).integers(0, m, size=max(length, 0))
    return ColorSequence(m, tuple(values.tolist()))


def trial_sequences(master_seed: int, trial: int, m: int, len_x: int, len_y: int) -> tuple:
    return (
        sample_sequence(m, len_x, trial_rng(master_seed, trial, ROLE_X)),
        sample_sequence(m, len_y, trial_rng(master_seed, trial, ROLE_Y)),
    )


# -- planting -----------------------------------------------------------------

def plant_E(Y: ColorSequence, n: int, k: int) -> ColorSequence:
    """Overwrite ``Y[n-1 .. n+k*m-2]`` with ``k`` reversed basic runs."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if k <= 0:
        return Y
    block = reversed_basic(Y.m).values * k
    return Y.replace(n - 1, block)


def planted_F_length(m: int, n: int, k: int) -> int:
    """Longest possible planted region: ``n + 1`` runs with maximal gaps."""
    return (n + 1) * m + n * (k - 1)


def plant_F(X: ColorSequence, n: int, k: int, seed) -> ColorSequence:
    """Place basic runs at 0 and after ``n`` gaps drawn uniformly from ``[0, k-1]``.

    Gap cells keep X's own values. Positions past the end of X that the
    planting needs are filled with seeded uniform colors.
    """
    if k < 1:
        raise DomainError("planting F needs k >= 1")
    if n < 1:
        raise DomainError("n must be >= 1")
    m = X.m
    rng = _as_rng(seed)
    gaps = rng.integers(0, k, size=n).tolist()
    needed = planted_F_length(m, n, k)
    values = list(X.values)
    if len(values) < needed:
        values.extend(rng.integers(0, m, size=needed - len(values)).tolist())
    pos = 0
    basic = list(range(m))
    for idx in range(n + 1):
        values[pos:pos + m] = basic
        pos += m
        if idx < n:
            pos += gaps[idx]
    return ColorSequence(m, tuple(values))


def planted_instance(m: int, n: int, k: int, seed: int, widening: int = 16) -> tuple:
    """X with F planted and Y with E planted, long enough for widened checks."""
    widest_start = n * (m + k - 1) + m + k
    len_x = max(widening * widest_start, planted_F_length(m, n, k))
    len_y = n + k * m
    X = sample_sequence(m, len_x, trial_rng(seed, 0, ROLE_X))
    Y = sample_sequence(m, len_y, trial_rng(seed, 0, ROLE_Y))
    X = plant_F(X, n, k, trial_rng(seed, 0, ROLE_AUX))
    return X, plant_E(Y, n, k)


# -- estimates ----------------------------------------------------------------

def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple:
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    return min(lo, p), max(hi, p)


@dataclass(frozen=True)
class TrialConfig:
    m: int
    n: int
    trials: int
    master_seed: int
    k: Optional[int] = None
    s: Optional[float] = None
    N: Optional[int] = None
    threads: int = 1
    planted_E: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.m < 1:
            raise DomainError("m must be >= 1")
        if self.n < 0:
            raise DomainError("n must be >= 0")

    @property
    def resolved_k(self) -> int:
        if self.k is not None:
            return self.k
        if self.s is None:
            raise DomainError("config needs k or s")
        return choose_k(self.s, self.n, self.m)

    @property
    def horizon(self) -> int:
        """Distance standing in for infinity; defaults to ``4 * n``."""
        return self.N if self.N is not None else 4 * self.n

    def to_dict(self) -> dict:
        # thread count is an execution detail and never affects results
        d = asdict(self)
        d.pop("threads")
        return d


@dataclass(frozen=True)
class EstimateResult:
    successes: int
    trials: int
    master_seed: int
    excluded: int = 0
    caveats: tuple = ()
    config: Optional[dict] = None

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise DomainError("successes must lie in [0, trials]")

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple:
        return wilson_interval(self.successes, self.trials)

    @property
    def sigma(self) -> float:
        """Binomial standard error of ``p_hat``."""
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    def to_dict(self) -> dict:
        lo, hi = self.ci
        return {
            "config": self.config,
            "successes": self.successes,
            "trials": self.trials,
            "p_hat": self.p_hat,
            "ci": [lo, hi],
            "master_seed": self.master_seed,
            "excluded": self.excluded,
            "caveats": list(self.caveats),
        }


def run_trials(trial_fn: Callable[[int], Sequence[int]], trials: int, threads: int = 1) -> list:
    """Sum per-trial count vectors over ``range(trials)``.

    Trials are split into contiguous blocks; block sums are added, so the
    total is independent of the thread count and of completion order.
    """
    threads = max(1, int(threads))

    def block(lo_hi):
        lo, hi = lo_hi
        acc = None
        for t in range(lo, hi):
            counts = trial_fn(t)
            acc = list(counts) if acc is None else [a + c for a, c in zip(acc, counts)]
        return acc

    if threads == 1 or trials < 2:
        parts = [block((0, trials))]
    else:
        nblocks = min(trials, threads * 4)
        edges = [trials * b // nblocks for b in range(nblocks + 1)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, zip(edges, edges[1:])))
    total = None
    for part in parts:
        if part is None:
            continue
        total = part if total is None else [a + c for a, c in zip(total, part)]
    return total or []


def f_prefix_length(m: int, n: int, k: int) -> int:
    """Prefix length on which ``holds_F`` can always decide."""
    return max(k - 1 + n * (m + k - 1) + m, m)


def estimate_event_probs(cfg: TrialConfig) -> tuple:
    """Empirical frequencies of E and F on fresh samples (no planting)."""
    m, n, k = cfg.m, cfg.n, cfg.resolved_k
    len_y = max(n + k * m - 1, 1)
    len_x = f_prefix_length(m, n, k)

    def trial(t):
        X, Y = trial_sequences(cfg.master_seed, t, m, len_x, len_y)
        e = holds_E(Y, n, k)
        try:
            f, undecided = holds_F(X, n, k), 0
        except InsufficientOccurrences:
            f, undecided = False, 1
        return int(e), int(f), undecided

    e_count, f_count, undecided = run_trials(trial, cfg.trials, cfg.threads)
    conf = cfg.to_dict()
    conf["k"] = k
    res_e = EstimateResult(e_count, cfg.trials, cfg.master_seed, config=conf)
    res_f = EstimateResult(
        f_count, cfg.trials - undecided, cfg.master_seed, excluded=undecided, config=conf,
        caveats=("trials whose prefix could not decide F are excluded",) if undecided else (),
    )
    return res_e, res_f


def _reach_counts(cfg: TrialConfig) -> list:
    m, n, big_n = cfg.m, cfg.n, cfg.horizon
    if big_n < n:
        raise DomainError("horizon N must be >= n")
    length = big_n + 1

    def trial(t):
        X, Y = trial_sequences(cfg.master_seed, t, m, length, length)
        d = max_reach_distance(X, Y, big_n)
        return int(d >= n), int(n <= d < big_n)

    return run_trials(trial, cfg.trials, cfg.threads)


def estimate_reach(cfg: TrialConfig) -> EstimateResult:
    reach, _ = _reach_counts(cfg)
    return EstimateResult(reach, cfg.trials, cfg.master_seed, config=cfg.to_dict())


def estimate_tail(cfg: TrialConfig) -> EstimateResult:
    """Frequency of reaching distance n but not N (N > n)."""
    if cfg.horizon <= cfg.n:
        raise DomainError("tail estimate needs N > n")
    _, tail = _reach_counts(cfg)
    return EstimateResult(tail, cfg.trials, cfg.master_seed,
                          caveats=(TAIL_PROXY_CAVEAT,), config=cfg.to_dict())


def estimate_reach_and_tail(cfg: TrialConfig) -> tuple:
    """Both estimates from one pass over the same seeded trials."""
    if cfg.horizon <= cfg.n:
        raise DomainError("tail estimate needs N > n")
    reach, tail = _reach_counts(cfg)
    conf = cfg.to_dict()
    return (
        EstimateResult(reach, cfg.trials, cfg.master_seed, config=conf),
        EstimateResult(tail, cfg.trials, cfg.master_seed, caveats=(TAIL_PROXY_CAVEAT,), config=conf),
    )


@dataclass(frozen=True)
class EventChainReport:
    config: dict
    trials: int
    excluded: int
    count_E: int
    count_F: int
    count_G: int
    count_FG: int
    count_EFG: int
    count_G_top: int
    count_G_right: int
    flag_threshold: float = 4.0

    @property
    def valid(self) -> int:
        return self.trials - self.excluded

    def freq(self, count: int) -> float:
        return count / self.valid if self.valid else 0.0

    @property
    def product(self) -> float:
        return self.freq(self.count_E) * self.freq(self.count_FG)

    @property
    def joint(self) -> float:
        return self.freq(self.count_EFG)

    @property
    def ratio(self) -> Optional[float]:
        return self.joint / self.product if self.product > 0 else None

    @property
    def sigma(self) -> float:
        """Binomial error of the joint frequency under the independence hypothesis."""
        p = self.product
        return math.sqrt(p * (1 - p) / self.valid) if self.valid else 0.0

    @property
    def z_score(self) -> Optional[float]:
        diff = self.joint - self.product
        if self.sigma > 0:
            return diff / self.sigma
        return None if diff == 0 else math.copysign(math.inf, diff)

    @property
    def flagged(self) -> bool:
        z = self.z_score
        return z is not None and abs(z) > self.flag_threshold

    def to_dict(self) -> dict:
        f = self.freq
        return {
            "config": self.config,
            "trials": self.trials,
            "excluded": self.excluded,
            "valid": self.valid,
            "p_E": f(self.count_E),
            "p_F": f(self.count_F),
            "p_G": f(self.count_G),
            "p_FG": f(self.count_FG),
            "p_EFG": self.joint,
            "product_E_FG": self.product,
            "ratio": self.ratio,
            "z": self.z_score,
            "flagged": self.flagged,
            "G_edges": {"top": f(self.count_G_top), "right": f(self.count_G_right)},
        }


def event_chain_probe(cfg: TrialConfig) -> EventChainReport:
    """Joint and marginal frequencies of E, F and G_n on shared samples.

    G_n is escape from ``[0, tau_n] x [0, n-1]``; trials whose X prefix holds
    fewer than ``n`` occurrences (or F undecidable) are excluded and counted.
    """
    m, n, k = cfg.m, cfg.n, cfg.resolved_k
    if n < 1:
        raise DomainError("n must be >= 1")
    len_y = max(n + k * m - 1, n + 1)
    len_x = f_prefix_length(m, n, k) + 16 * n * m ** m

    def trial(t):
        X, Y = trial_sequences(cfg.master_seed, t, m, len_x, len_y)
        if cfg.planted_E:
            Y = plant_E(Y, n, k)
        table = find_occurrences(X, max_count=n + 1)
        if len(table) < n or table.tau(n) + 1 >= len(X):
            return 0, 0, 0, 0, 0, 0, 0, 1
        try:
            f = holds_F(X, n, k, table)
        except InsufficientOccurrences:
            return 0, 0, 0, 0, 0, 0, 0, 1
        e = holds_E(Y, n, k)
        top, right = escape_edges(X, Y, Rectangle(table.tau(n), n - 1))
        g = top or right
        return (int(e), int(f), int(g), int(f and g), int(e and f and g),
                int(top), int(right), 0)

    counts = run_trials(trial, cfg.trials, cfg.threads)
    e, f, g, fg, efg, top, right, excluded = counts
    conf = cfg.to_dict()
    conf["k"] = k
    return EventChainReport(conf, cfg.trials, excluded, e, f, g, fg, efg, top, right)


# -- power-law fitting ----------------------------------------------------------

POWER_LAW_RESIDUAL_THRESHOLD = 0.05


@dataclass(frozen=True)
class TailFit:
    points: tuple
    alpha: float
    log_c: float
    residual: float
    threshold: float = POWER_LAW_RESIDUAL_THRESHOLD

    @property
    def power_law(self) -> bool:
        return self.residual <= self.threshold

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "alpha": self.alpha,
            "log_c": self.log_c,
            "residual": self.residual,
            "threshold": self.threshold,
            "power_law": self.power_law,
        }


def fit_power_law(points, threshold: float = POWER_LAW_RESIDUAL_THRESHOLD) -> TailFit:
    """Least-squares line through ``(ln n, ln p)``; the slope is ``-alpha``.

    ``residual`` is the RMS of the log-space residuals. Points with
    ``p <= 0`` are dropped.
    """
    pts = tuple((float(n), float(p)) for n, p in points if p > 0)
    if len(pts) < 2:
        raise DegenerateFit("need at least two points with positive probability")
    x = np.log([n for n, _ in pts])
    y = np.log([p for _, p in pts])
    if np.ptp(x) == 0:
        raise DegenerateFit("all points share the same n")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return TailFit(pts, float(-slope), float(intercept), rms, threshold)


@dataclass(frozen=True)
class SweepRow:
    m: int
    n: int
    k: Optional[int]
    s: Optional[float]
    reach: EstimateResult
    tail: EstimateResult

    def csv_fields(self) -> list:
        lo, hi = self.tail.ci
        return [self.m, self.n, "" if self.k is None else self.k, "" if self.s is None else self.s,
                self.tail.trials, self.tail.successes, repr(self.tail.p_hat),
                repr(lo), repr(hi), self.tail.master_seed]


def tail_sweep(m: int, ns: Sequence[int], n_factor: int, trials: int, master_seed: int,
               threads: int = 1) -> tuple:
    """Tail estimates over several n, each with N = n_factor * n, plus a fit."""
    rows = []
    for n in ns:
        cfg = TrialConfig(m=m, n=n, trials=trials, master_seed=master_seed,
                          N=n_factor * n, threads=threads)
        reach, tail = estimate_reach_and_tail(cfg)
        rows.append(SweepRow(m, n, None, None, reach, tail))
    try:
        fit = fit_power_law([(r.n, r.tail.p_hat) for r in rows])
    except DegenerateFit:
        fit = None
    return rows, fit

