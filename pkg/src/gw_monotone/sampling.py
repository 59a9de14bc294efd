"""Monte Carlo cross-validation samplers.

Covers unconditioned Galton-Watson generation with a size cap,
conditioned sampling (exact inversion table or rejection), the uniform
plane tree via the cycle lemma, and truncated simulation of the
size-biased infinite tree down a spine of immortal vertices.

Randomness is stream-addressed: RngSpec(seed, stream_id) always yields
the same sample sequence, and replications split across streams merge in
stream order, so results are independent of scheduling.
"""

from __future__ import annotations

import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    NotCriticalError,
    NotNormalizedError,
    OffspringModel,
    conditioned_dist,
    format_rational,
)
from .trees import PlaneTree

_MASK64 = (1 << 64) - 1
_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream_id: int = 0

    def make(self) -> random.Random:
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")
        return random.Random(((self.seed & _MASK64) << 64) | self.stream_id)

    def stream(self, offset: int) -> "RngSpec":
        return RngSpec(self.seed, self.stream_id + offset)


class _Sentinel:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Returned by sample_gw when the tree grows past size_cap.
OVERFLOW = _Sentinel("OVERFLOW")
#: Returned by rejection sampling when the attempt budget runs out.
EXHAUSTED = _Sentinel("EXHAUSTED")


def _offspring_sampler(model: OffspringModel):
    """Inverse-CDF draw of the offspring count (float thresholds)."""
    if model.max_degree is not None:
        cum = []
        acc = 0.0
        for j in range(model.max_degree + 1):
            acc += float(model.weight(j))
            cum.append(acc)

        def draw(rng: random.Random) -> int:
            u = rng.random()
            for j, c in enumerate(cum):
                if u <= c:
                    return j
            return model.max_degree

    else:

        def draw(rng: random.Random) -> int:
            u = rng.random()
            acc = 0.0
            j = 0
            while True:
                acc += float(model.weight(j))
                if u <= acc or j > 10_000:
                    return j
                j += 1

    return draw


def _size_biased_sampler(model: OffspringModel):
    """Draw from P(j) = j * p_j; works for unbounded support by walking j."""
    if not (model.normalized and model.mean_one):
        raise NotCriticalError(f"{model.family} is not a critical probability law")

    def draw(rng: random.Random) -> int:
        u = rng.random()
        acc = 0.0
        j = 1
        while True:
            acc += j * float(model.weight(j))
            if u <= acc or j > 10_000:
                return j
            j += 1

    return draw


def _check_normalized(model: OffspringModel) -> None:
    if not model.normalized:
        raise NotNormalizedError(f"{model.family} weights are not a probability law")


def sample_gw(model: OffspringModel, rng: random.Random, size_cap: int):
    """One unconditioned Galton-Watson tree, or OVERFLOW past size_cap.

    Generation is breadth first and aborts the moment the vertex count
    would exceed size_cap (critical trees have infinite expected size, so
    an uncapped run must never happen).
    """
    _check_normalized(model)
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    draw = _offspring_sampler(model)
    return _grow_gw(draw, rng, size_cap)


def _grow_gw(draw, rng: random.Random, size_cap: int):
    children = [[]]
    count = 1
    queue = deque([0])
    while queue:
        v = queue.popleft()
        d = draw(rng)
        if count + d > size_cap:
            return OVERFLOW
        count += d
        for _ in range(d):
            children.append([])
            children[v].append(len(children) - 1)
            queue.append(len(children) - 1)
    code = []
    stack = [0]
    while stack:
        v = stack.pop()
        code.append(len(children[v]))
        stack.extend(reversed(children[v]))
    return PlaneTree(code)


def exact_table_sampler(model: OffspringModel, n: int):
    """Inversion sampler over the exact conditioned distribution.

    Builds the table once; the returned closure is cheap per draw.  The
    cumulative thresholds come from exact rationals, converted to float
    only for the comparison with the uniform variate.
    """
    dist = conditioned_dist(model, n)
    trees = list(dist.probs)
    cum = []
    acc = Fraction(0)
    for t in trees:
        acc += dist.probs[t]
        cum.append(float(acc))

    def draw(rng: random.Random) -> PlaneTree:
        u = rng.random()
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u <= cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        return trees[lo]

    return draw


def sample_conditioned(model: OffspringModel, n: int, rng: random.Random,
                       method: str = "exact_table", max_attempts: int = 1_000_000):
    """One draw of T_n, by exact inversion or by capped rejection."""
    if method == "exact_table":
        return exact_table_sampler(model, n)(rng)
    if method == "rejection":
        _check_normalized(model)
        draw = _offspring_sampler(model)
        for _ in range(max_attempts):
            t = _grow_gw(draw, rng, n)
            if t is not OVERFLOW and t.size == n:
                return t
        return EXHAUSTED
    raise ValueError(f"unknown method {method!r}")


def sample_uniform_plane(n: int, rng: random.Random) -> PlaneTree:
    """Uniform plane tree on n vertices in linear time, via the cycle lemma.

    A uniform arrangement of n-1 unit increments among n slots gives a
    uniform outdegree composition; exactly one cyclic rotation of it is a
    valid preorder code, namely the one starting right after the first
    minimum of the prefix sums of d_i - 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return PlaneTree((0,))
    steps = [1] * (n - 1) + [0] * (n - 1)
    rng.shuffle(steps)
    degs = []
    run = 0
    for x in steps:
        if x:
            run += 1
        else:
            degs.append(run)
            run = 0
    degs.append(run)
    s = 0
    low = 1
    cut = 0
    for i, d in enumerate(degs):
        s += d - 1
        if s < low:
            low = s
            cut = i + 1
    return PlaneTree(degs[cut:] + degs[:cut])


@dataclass(frozen=True)
class SpineConfig:
    """Truncated simulation of the size-biased infinite tree."""

    model: OffspringModel
    depth: int
    replications: int
    rng: RngSpec
    streams: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.replications < 1 or self.streams < 1:
            raise ValueError("replications and streams must be positive")


@dataclass
class SpineEstimate:
    """Profile estimates E W_k of the infinite tree, k below the truncation."""

    depth: int
    replications: int
    means: dict
    half_widths: dict  # 99% confidence, normal approximation
    counts: dict = field(repr=False, default_factory=dict)

    def to_json(self, targets: dict = None) -> list:
        rows = []
        for k in sorted(self.means):
            row = {
                "k": k,
                "mean": self.means[k],
                "half_width": self.half_widths[k],
                "reps": self.replications,
            }
            if targets and k in targets:
                row["target"] = format_rational(targets[k])
            rows.append(row)
        return rows


def _spine_replication(sb_draw, off_draw, rng, depth) -> list:
    counts = [0] * depth
    counts[0] = 1
    mortals = []  # (level, count) batches awaiting subtree growth
    for level in range(depth - 1):
        jhat = sb_draw(rng)
        rng.randrange(jhat)  # spine child position among its siblings
        counts[level + 1] += jhat
        if jhat > 1:
            mortals.append((level + 1, jhat - 1))
    for root_level, width in mortals:
        frontier = width  # roots already counted at root_level
        level = root_level
        while frontier and level + 1 < depth:
            nxt = 0
            for _ in range(frontier):
                nxt += off_draw(rng)
            counts[level + 1] += nxt
            frontier = nxt
            level += 1
    return counts


def sample_spine(config: SpineConfig) -> SpineEstimate:
    """Estimate E W_k(T_infinity) for k < depth by simulating the spine.

    Each level's spine vertex draws a size-biased offspring count, one
    uniformly chosen child continues the spine, and the remaining
    children root independent Galton-Watson trees truncated at the
    configured depth.
    """
    model = config.model
    _check_normalized(model)
    sb_draw = _size_biased_sampler(model)
    off_draw = _offspring_sampler(model)
    depth, reps = config.depth, config.replications

    sums = [0] * depth
    sqsums = [0] * depth
    counts = {k: Counter() for k in range(depth)}
    per_stream = [reps // config.streams] * config.streams
    for i in range(reps % config.streams):
        per_stream[i] += 1
    for sid, quota in enumerate(per_stream):
        rng = config.rng.stream(sid).make()
        for _ in range(quota):
            w = _spine_replication(sb_draw, off_draw, rng, depth)
            for k, c in enumerate(w):
                sums[k] += c
                sqsums[k] += c * c
                counts[k][c] += 1

    means, half_widths = {}, {}
    for k in range(depth):
        mean = sums[k] / reps
        var = (sqsums[k] - reps * mean * mean) / (reps - 1) if reps > 1 else 0.0
        half_widths[k] = _Z99 * math.sqrt(max(var, 0.0) / reps)
        means[k] = mean
    return SpineEstimate(depth, reps, means, half_widths, counts)
