import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2

from gw_monotone.model import (
    NotNormalizedError,
    binomial,
    conditioned_dist,
    custom,
    epsilon,
    geometric_half,
    poisson_one,
    tree_weight,
)
from gw_monotone.sampling import (
    EXHAUSTED,
    OVERFLOW,
    RngSpec,
    SpineConfig,
    exact_table_sampler,
    sample_conditioned,
    sample_gw,
    sample_spine,
    sample_uniform_plane,
)
from gw_monotone.trees import PlaneTree, enumerate_trees, profile


def two_sample_chi2(c1: Counter, c2: Counter) -> float:
    """p-value for homogeneity of two count tables over a common support."""
    support = sorted(set(c1) | set(c2))
    n1, n2 = sum(c1.values()), sum(c2.values())
    stat = 0.0
    dof = -1
    for v in support:
        total = c1[v] + c2[v]
        if total < 10:
            continue
        e1 = total * n1 / (n1 + n2)
        e2 = total * n2 / (n1 + n2)
        stat += (c1[v] - e1) ** 2 / e1 + (c2[v] - e2) ** 2 / e2
        dof += 1
    return 1.0 if dof < 1 else float(chi2.sf(stat, dof))


def test_rng_reproducibility():
    a = RngSpec(123, 5).make()
    b = RngSpec(123, 5).make()
    assert [a.random() for _ in range(100)] == [b.random() for _ in range(100)]
    c = RngSpec(123, 6).make()
    assert a.random() != c.random()


def test_stream_partition_is_deterministic():
    cfg = SpineConfig(binomial(2), depth=4, replications=1000, rng=RngSpec(9),
                      streams=4)
    e1 = sample_spine(cfg)
    e2 = sample_spine(cfg)
    assert e1.means == e2.means and e1.counts == e2.counts


def test_sample_gw_degenerate():
    p0 = custom(["1"])
    rng = RngSpec(0).make()
    for _ in range(50):
        assert sample_gw(p0, rng, 10) == PlaneTree((0,))


def test_sample_gw_requires_normalized():
    with pytest.raises(NotNormalizedError):
        sample_gw(poisson_one(), RngSpec(0).make(), 10)


def test_overflow_rate_binary_cap_one():
    rng = RngSpec(11).make()
    n = 20000
    overflows = sum(sample_gw(binomial(2), rng, 1) is OVERFLOW for _ in range(n))
    p = Fraction(3, 4)
    se = math.sqrt(float(p * (1 - p)) / n)
    assert abs(overflows / n - 0.75) < 3 * se


def test_gw_shape_ratio_eps():
    # among size-3 outcomes, path vs cherry frequency tracks the weight
    # ratio 36/729
    model = epsilon("1/10")
    rng = RngSpec(21).make()
    counts = Counter()
    for _ in range(40000):
        t = sample_gw(model, rng, 8)
        if t is not OVERFLOW and t.size == 3:
            counts[t] += 1
    n3 = counts.total()
    p1 = float(Fraction(36, 765))
    se = math.sqrt(p1 * (1 - p1) / n3)
    assert abs(counts[PlaneTree((1, 1, 0))] / n3 - p1) < 3 * se


def test_exact_table_frequencies():
    model = epsilon("1/10")
    dist = conditioned_dist(model, 3)
    draw = exact_table_sampler(model, 3)
    rng = RngSpec(5).make()
    n = 50000
    counts = Counter(draw(rng) for _ in range(n))
    for t, p in dist.probs.items():
        se = math.sqrt(float(p * (1 - p)) / n)
        assert abs(counts[t] / n - float(p)) < 4 * se


def test_conditioned_point_mass():
    t = sample_conditioned(binomial(2), 1, RngSpec(0).make())
    assert t == PlaneTree((0,))


def test_rejection_matches_table():
    model = binomial(2)
    rng = RngSpec(17).make()
    n = 10000
    table = Counter(sample_conditioned(model, 5, rng, "exact_table")
                    for _ in range(n))
    rej = Counter(sample_conditioned(model, 5, rng, "rejection")
                  for _ in range(n))
    assert two_sample_chi2(table, rej) > 0.01


def test_rejection_exhaustion():
    out = sample_conditioned(binomial(2), 2, RngSpec(0).make(), "rejection",
                             max_attempts=0)
    assert out is EXHAUSTED


def test_unknown_method():
    with pytest.raises(ValueError):
        sample_conditioned(binomial(2), 3, RngSpec(0).make(), "mcmc")


def test_uniform_plane_small_sizes():
    rng = RngSpec(3).make()
    assert sample_uniform_plane(1, rng) == PlaneTree((0,))
    n = 30000
    counts3 = Counter(sample_uniform_plane(3, rng) for _ in range(n))
    for t in enumerate_trees(3):
        se = math.sqrt(0.5 * 0.5 / n)
        assert abs(counts3[t] / n - 0.5) < 3 * se
    counts4 = Counter(sample_uniform_plane(4, rng) for _ in range(n))
    assert set(counts4) == set(enumerate_trees(4))
    for t in enumerate_trees(4):
        se = math.sqrt(0.2 * 0.8 / n)
        assert abs(counts4[t] / n - 0.2) < 3 * se


@settings(max_examples=200)
@given(st.integers(1, 40), st.integers(0, 2 ** 32))
def test_uniform_plane_always_valid(n, seed):
    t = sample_uniform_plane(n, RngSpec(seed).make())
    assert t.size == n  # PlaneTree constructor enforces code validity


def test_spine_errors():
    with pytest.raises(ValueError):
        SpineConfig(binomial(2), depth=0, replications=10, rng=RngSpec(0))
    from gw_monotone.model import NotCriticalError
    with pytest.raises(NotCriticalError):
        sample_spine(SpineConfig(custom(["1/2", "1/2"]), depth=3,
                                 replications=10, rng=RngSpec(0)))


def test_spine_root_is_constant():
    est = sample_spine(SpineConfig(binomial(2), depth=3, replications=500,
                                   rng=RngSpec(1)))
    assert est.means[0] == 1.0 and est.half_widths[0] == 0.0


def test_spine_means_hit_targets():
    est = sample_spine(SpineConfig(binomial(2), depth=4, replications=30000,
                                   rng=RngSpec(2)))
    assert abs(est.means[1] - 1.5) <= est.half_widths[1]
    est = sample_spine(SpineConfig(geometric_half(), depth=4,
                                   replications=30000, rng=RngSpec(2)))
    assert abs(est.means[2] - 5.0) <= est.half_widths[2]


def test_spine_truncation_invariance():
    # W_2 statistics must not depend on how far below level 2 we simulate
    shallow = sample_spine(SpineConfig(binomial(2), depth=3, replications=8000,
                                       rng=RngSpec(31)))
    deep = sample_spine(SpineConfig(binomial(2), depth=5, replications=8000,
                                    rng=RngSpec(32)))
    assert two_sample_chi2(shallow.counts[2], deep.counts[2]) > 0.01


def test_uniform_plane_profile_converges():
    # exact E W_1 for the plane-tree family approaches 3 as n grows, and the
    # n = 200 estimate agrees with the limit
    from gw_monotone.model import expected_profile
    exact = [float(expected_profile(geometric_half(), n, 1)[1])
             for n in range(2, 13)]
    assert all(b > a for a, b in zip(exact, exact[1:]))
    rng = RngSpec(41).make()
    n, reps = 200, 5000
    vals = [profile(sample_uniform_plane(n, rng))[1] for _ in range(reps)]
    mean = sum(vals) / reps
    var = sum((v - mean) ** 2 for v in vals) / (reps - 1)
    hw = 2.5758293035489004 * math.sqrt(var / reps)
    assert abs(mean - 3.0) < 3 * hw


def test_estimate_json_targets():
    est = sample_spine(SpineConfig(binomial(2), depth=3, replications=100,
                                   rng=RngSpec(0)))
    rows = est.to_json({1: Fraction(3, 2)})
    assert rows[1]["target"] == "3/2"
    assert isinstance(rows[1]["mean"], float)
