"""Offspring laws and exact conditioned Galton-Watson distributions.

All probabilities are `fractions.Fraction`; nothing here ever rounds.
A model is a nonnegative rational weight sequence w_j, meaningful up to
exponential tilting w_j -> a * b^j * w_j: conditioning on the tree size
cancels any tilt, which is what lets Poisson(1) live here as w_j = 1/j!.
Critical variance sigma^2 is carried as exact metadata on the named
families, since the weights alone do not pin down the critical
representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Optional

from .trees import PlaneTree, enumerate_trees, profile


class ZeroMassError(ValueError):
    """Conditioning on a size the offspring law cannot produce."""


class NotCriticalError(ValueError):
    """Operation requires a proper critical probability law (mean 1)."""


class NotNormalizedError(ValueError):
    """Operation requires weights that form a probability law."""


def parse_rational(s) -> Fraction:
    """Parse 'p/q' or integer strings; Fractions and ints pass through."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


def format_rational(x: Fraction) -> str:
    """Render exactly, as 'p/q' or a plain integer.  Never a float."""
    return str(Fraction(x))


class OffspringModel:
    """A weight sequence w_j with family metadata.

    max_degree=None means unbounded support; size-n computations then
    truncate losslessly at outdegree n-1.  `normalized` marks weight
    sequences that are genuine probability laws (needed for sampling);
    `mean_one` additionally marks criticality.
    """

    def __init__(
        self,
        family: str,
        weight_fn: Callable[[int], Fraction],
        *,
        max_degree: Optional[int] = None,
        sigma2: Optional[Fraction] = None,
        mean_one: bool = False,
        normalized: bool = False,
        params: Optional[dict] = None,
    ):
        self.family = family
        self._weight_fn = weight_fn
        self.max_degree = max_degree
        self.sigma2 = sigma2
        self.mean_one = mean_one
        self.normalized = normalized
        self.params = dict(params or {})

    def weight(self, j: int) -> Fraction:
        if j < 0:
            return Fraction(0)
        if self.max_degree is not None and j > self.max_degree:
            return Fraction(0)
        return self._weight_fn(j)

    def degree_bound(self, n: int) -> int:
        """Largest outdegree relevant in a tree of size n."""
        if self.max_degree is None:
            return n - 1
        return min(self.max_degree, n - 1)

    def spec(self) -> dict:
        """JSON-able description, with rationals as 'p/q' strings."""
        out = {"family": self.family}
        for key, val in self.params.items():
            out[key] = format_rational(val) if isinstance(val, Fraction) else val
        return out

    def __repr__(self) -> str:
        return f"OffspringModel({self.spec()})"


def geometric_half() -> OffspringModel:
    """Ge(1/2): w_j = 2^-(j+1); the conditioned tree is the uniform plane tree."""
    return OffspringModel(
        "geometric_half",
        lambda j: Fraction(1, 2 ** (j + 1)),
        max_degree=None,
        sigma2=Fraction(2),
        mean_one=True,
        normalized=True,
    )


def poisson_one() -> OffspringModel:
    """Po(1) up to tilting: w_j = 1/j! (the e^-1 factor is a tilt and cancels)."""
    return OffspringModel(
        "poisson_one",
        lambda j: Fraction(1, factorial(j)),
        max_degree=None,
        sigma2=Fraction(1),
        mean_one=True,
        normalized=False,
    )


def binomial(d: int) -> OffspringModel:
    """Bi(d, 1/d): the d-ary tree family; sigma^2 = 1 - 1/d."""
    if d < 2:
        raise ValueError("binomial family needs d >= 2")
    weights = [Fraction(comb(d, j)) * Fraction(1, d) ** j * Fraction(d - 1, d) ** (d - j)
               for j in range(d + 1)]
    return OffspringModel(
        f"binomial_{d}",
        lambda j: weights[j],
        max_degree=d,
        sigma2=Fraction(d - 1, d),
        mean_one=True,
        normalized=True,
        params={"d": d},
    )


def epsilon(eps) -> OffspringModel:
    """The counterexample family: p_0 = p_2 = (1-eps)/2, p_1 = eps."""
    eps = parse_rational(eps)
    if not 0 < eps < 1:
        raise ValueError("epsilon family needs 0 < eps < 1")
    q = (1 - eps) / 2
    weights = [q, eps, q]
    return OffspringModel(
        "epsilon",
        lambda j: weights[j],
        max_degree=2,
        sigma2=1 - eps,
        mean_one=True,
        normalized=True,
        params={"eps": eps},
    )


def custom(weights, sigma2=None) -> OffspringModel:
    """Finite weight sequence; criticality and sigma^2 inferred when it is a law."""
    ws = [parse_rational(w) for w in weights]
    if not ws or ws[0] <= 0:
        raise ValueError("custom weights need w_0 > 0")
    if any(w < 0 for w in ws):
        raise ValueError("weights must be nonnegative")
    normalized = sum(ws) == 1
    mean = sum(j * w for j, w in enumerate(ws))
    mean_one = normalized and mean == 1
    if sigma2 is None and mean_one:
        sigma2 = sum(j * j * w for j, w in enumerate(ws)) - 1
    elif sigma2 is not None:
        sigma2 = parse_rational(sigma2)
    return OffspringModel(
        "custom",
        lambda j: ws[j],
        max_degree=len(ws) - 1,
        sigma2=sigma2,
        mean_one=mean_one,
        normalized=normalized,
        params={"weights": [format_rational(w) for w in ws]},
    )


def tilt(model: OffspringModel, a, b) -> OffspringModel:
    """Reweight w_j -> a * b^j * w_j; every conditioned distribution is unchanged."""
    a = parse_rational(a)
    b = parse_rational(b)
    if a <= 0 or b <= 0:
        raise ValueError("tilt parameters must be positive")
    identity = a == 1 and b == 1
    base = model.weight
    return OffspringModel(
        f"tilted({model.family})" if not identity else model.family,
        lambda j: a * b ** j * base(j),
        max_degree=model.max_degree,
        sigma2=model.sigma2,
        mean_one=model.mean_one and identity,
        normalized=model.normalized and identity,
        params=dict(model.params, a=a, b=b) if not identity else model.params,
    )


def tree_weight(model: OffspringModel, t: PlaneTree) -> Fraction:
    """Product of w_{d(v)} over the vertices; 0 if any outdegree is unweighted."""
    w = Fraction(1)
    for d in t.code:
        wd = model.weight(d)
        if wd == 0:
            return Fraction(0)
        w *= wd
    return w


@dataclass
class ConditionedDist:
    """Exact law of the conditioned tree T_n: probs maps tree -> Fraction."""

    n: int
    model: OffspringModel
    probs: dict

    def support(self) -> list:
        return list(self.probs)

    def to_json(self) -> dict:
        return {
            "model": self.model.spec(),
            "n": self.n,
            "probs": [[t.to_json(), format_rational(p)] for t, p in self.probs.items()],
        }


def conditioned_dist(model: OffspringModel, n: int) -> ConditionedDist:
    """Condition the Galton-Watson tree on having exactly n vertices."""
    if n < 1:
        raise ValueError("n must be >= 1")
    weighted = []
    total = Fraction(0)
    for t in enumerate_trees(n, model.degree_bound(n)):
        w = tree_weight(model, t)
        if w > 0:
            weighted.append((t, w))
            total += w
    if total == 0:
        raise ZeroMassError(f"{model.family} has no trees of size {n}")
    return ConditionedDist(n, model, {t: w / total for t, w in weighted})


def expected_profile(model: OffspringModel, n: int, kmax: Optional[int] = None):
    """Exact E W_k(T_n) for 0 <= k <= kmax (default: n-1, the deepest level)."""
    dist = conditioned_dist(model, n)
    kk = n - 1 if kmax is None else kmax
    vec = [Fraction(0)] * (kk + 1)
    for t, p in dist.probs.items():
        for k, w in enumerate(profile(t)):
            if k > kk:
                break
            vec[k] += p * w
    return vec


def size_biased(model: OffspringModel) -> dict:
    """The law of xi-hat: P(xi-hat = j) = j * p_j, exact for finite support."""
    if not (model.normalized and model.mean_one):
        raise NotCriticalError(f"{model.family} is not a critical probability law")
    if model.max_degree is None:
        raise ValueError("exact size-biasing needs finite support")
    out = {}
    for j in range(1, model.max_degree + 1):
        p = j * model.weight(j)
        if p > 0:
            out[j] = p
    assert sum(out.values()) == 1
    return out


def limit_profile(model: OffspringModel, k: int) -> Fraction:
    """E W_k of the size-biased limit tree: 1 + k * sigma^2."""
    if model.sigma2 is None:
        raise ValueError(f"{model.family} has no sigma^2 metadata")
    return 1 + k * model.sigma2
