import itertools
from fractions import Fraction

import pytest

from gw_monotone.model import (
    NotCriticalError,
    ZeroMassError,
    binomial,
    conditioned_dist,
    custom,
    epsilon,
    expected_profile,
    format_rational,
    geometric_half,
    limit_profile,
    parse_rational,
    poisson_one,
    size_biased,
    tilt,
    tree_weight,
)
from gw_monotone.trees import PlaneTree

T1 = PlaneTree((1, 1, 0))
T2 = PlaneTree((2, 0, 0))
T3 = PlaneTree((1, 1, 1, 0))
T4 = PlaneTree((1, 2, 0, 0))
T5 = PlaneTree((2, 1, 0, 0))
T6 = PlaneTree((2, 0, 1, 0))

EPS10 = epsilon(Fraction(1, 10))


def brute_force_dist(model, n):
    """Independent oracle: scan all outdegree sequences of length n."""
    weights = {}
    for seq in itertools.product(range(n), repeat=n):
        if sum(seq) != n - 1:
            continue
        if any(sum(seq[: k + 1]) < k + 1 for k in range(n - 1)):
            continue
        w = Fraction(1)
        for d in seq:
            w *= model.weight(d)
        if w > 0:
            weights[seq] = w
    total = sum(weights.values())
    if total == 0:
        raise ZeroMassError("no mass")
    return {seq: w / total for seq, w in weights.items()}


def test_weight_examples():
    assert tree_weight(EPS10, T1) == Fraction(9, 2000)
    assert tree_weight(EPS10, T2) == Fraction(729, 8000)
    assert tree_weight(EPS10, PlaneTree((0,))) == Fraction(9, 20)
    # zero-weight outdegree kills the product, no error
    strict = custom(["1/2", "0", "1/2"])
    assert tree_weight(strict, T1) == 0


def test_counterexample_probabilities():
    d3 = conditioned_dist(EPS10, 3)
    assert d3.probs == {T1: Fraction(4, 85), T2: Fraction(81, 85)}
    d4 = conditioned_dist(EPS10, 4)
    assert d4.probs[T3] == Fraction(4, 247)
    assert d4.probs[T4] == d4.probs[T5] == d4.probs[T6] == Fraction(81, 247)


@pytest.mark.parametrize("model", [EPS10, binomial(2), binomial(3),
                                   geometric_half(), poisson_one()],
                         ids=["eps", "bi2", "bi3", "ge", "po"])
@pytest.mark.parametrize("n", range(1, 7))
def test_against_brute_force(model, n):
    dist = conditioned_dist(model, n)
    assert {t.code: p for t, p in dist.probs.items()} == brute_force_dist(model, n)
    assert sum(dist.probs.values()) == 1


def test_zero_mass():
    strict = custom(["1/2", "0", "1/2"])
    with pytest.raises(ZeroMassError):
        conditioned_dist(strict, 2)  # no strict binary tree has 2 vertices


def test_point_mass_at_n1():
    dist = conditioned_dist(geometric_half(), 1)
    assert dist.probs == {PlaneTree((0,)): Fraction(1)}


def test_expected_profile_values():
    assert expected_profile(EPS10, 3, 1)[1] == Fraction(166, 85)
    assert expected_profile(EPS10, 4, 1)[1] == Fraction(409, 247)
    assert expected_profile(EPS10, 4, 0)[0] == 1


@pytest.mark.parametrize("model", [EPS10, binomial(2), geometric_half()],
                         ids=["eps", "bi2", "ge"])
@pytest.mark.parametrize("n", range(1, 7))
def test_profile_mass(model, n):
    assert sum(expected_profile(model, n)) == n


def test_size_biased():
    assert size_biased(binomial(2)) == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    eps = Fraction(1, 7)
    assert size_biased(epsilon(eps)) == {1: eps, 2: 1 - eps}
    with pytest.raises(NotCriticalError):
        size_biased(custom(["1/2", "1/2"]))  # mean 1/2
    with pytest.raises(NotCriticalError):
        size_biased(poisson_one())  # weights 1/j! are not normalized


@pytest.mark.parametrize("model", [epsilon("1/10"), binomial(2), binomial(3),
                                   custom(["1/2", "0", "1/2"])],
                         ids=["eps", "bi2", "bi3", "strict"])
def test_size_bias_variance_identity(model):
    law = size_biased(model)
    assert sum((j - 1) * p for j, p in law.items()) == model.sigma2


def test_limit_profile():
    assert limit_profile(geometric_half(), 1) == 3
    assert limit_profile(EPS10, 1) == Fraction(19, 10)
    assert limit_profile(binomial(2), 0) == 1
    with pytest.raises(ValueError):
        limit_profile(custom(["1/2", "1/4"]), 1)  # no sigma^2 derivable


@pytest.mark.parametrize("model", [EPS10, binomial(2), geometric_half(), poisson_one()],
                         ids=["eps", "bi2", "ge", "po"])
def test_tilt_invariance(model):
    scalars = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]
    for a in scalars:
        for b in scalars:
            tilted = tilt(model, a, b)
            for n in (1, 3, 5):
                assert conditioned_dist(tilted, n).probs == \
                    conditioned_dist(model, n).probs


def test_tilt_identity_and_validation():
    m = tilt(EPS10, 1, 1)
    assert m.weight(2) == EPS10.weight(2)
    assert m.mean_one
    with pytest.raises(ValueError):
        tilt(EPS10, 0, 1)


def test_poisson_equals_its_tilted_form():
    # w_j = 1/j! stands in for e^-1/j!: any positive tilt of it conditions
    # to the same law
    po = poisson_one()
    shifted = tilt(po, Fraction(1, 3), Fraction(1))
    assert conditioned_dist(po, 3).probs == conditioned_dist(shifted, 3).probs


def test_custom_inference():
    strict = custom(["1/2", "0", "1/2"])
    assert strict.normalized and strict.mean_one
    assert strict.sigma2 == 1
    unnorm = custom(["1", "2", "1"])
    assert not unnorm.normalized and not unnorm.mean_one


def test_rational_io():
    assert parse_rational("4/85") == Fraction(4, 85)
    assert parse_rational("3") == 3
    assert format_rational(Fraction(81, 85)) == "81/85"
    assert format_rational(Fraction(3)) == "3"


def test_epsilon_validation():
    with pytest.raises(ValueError):
        epsilon(0)
    with pytest.raises(ValueError):
        epsilon(1)
    with pytest.raises(ValueError):
        binomial(1)
