"""Exact monotone-coupling feasibility and profile monotonicity checks.

Feasibility of coupling T_n inside T_{n+1} along the leaf-insertion
relation is a transportation problem; it is decided by an exact max-flow
on integer capacities obtained by clearing the common denominator of
both conditioned distributions.  When infeasible, the source side of the
min cut is a Hall violator: a set A of size-n trees with
mu(A) > nu(extensions of A).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from .model import (
    ConditionedDist,
    OffspringModel,
    conditioned_dist,
    epsilon,
    expected_profile,
    format_rational,
)
from .trees import PlaneTree, extensions


class _FlowNet:
    """Max flow with integer capacities, shortest augmenting paths (BFS)."""

    def __init__(self, n: int):
        self.n = n
        self.adj = [[] for _ in range(n)]  # per node: [to, cap, rev_index]

    def add_edge(self, u: int, v: int, cap: int) -> None:
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            prev = [None] * self.n  # (node, edge index) into each reached node
            prev[s] = (s, -1)
            queue = deque([s])
            while queue and prev[t] is None:
                u = queue.popleft()
                for i, (v, cap, _) in enumerate(self.adj[u]):
                    if cap > 0 and prev[v] is None:
                        prev[v] = (u, i)
                        queue.append(v)
            if prev[t] is None:
                return flow
            bottleneck = None
            v = t
            while v != s:
                u, i = prev[v]
                cap = self.adj[u][i][1]
                bottleneck = cap if bottleneck is None else min(bottleneck, cap)
                v = u
            v = t
            while v != s:
                u, i = prev[v]
                edge = self.adj[u][i]
                edge[1] -= bottleneck
                self.adj[edge[0]][edge[2]][1] += bottleneck
                v = u
            flow += bottleneck

    def reachable(self, s: int) -> set:
        """Residual-reachable nodes from s (the source side of the min cut)."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


@dataclass
class FlowResult:
    """Verdict on coupling T_n into T_{n+1} along leaf insertion.

    Feasible: `coupling` is an exact joint law with the two conditioned
    distributions as marginals, supported on insertion pairs.
    Infeasible: `witness` is a set A with mu_mass = mu(A) > nu(Gamma(A))
    = nu_mass, where Gamma(A) collects all one-leaf extensions of A.
    """

    feasible: bool
    n: int
    coupling: Optional[dict] = None
    witness: Optional[tuple] = None
    mu_mass: Optional[Fraction] = None
    nu_mass: Optional[Fraction] = None

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    def to_json(self, model: Optional[OffspringModel] = None) -> dict:
        out = {"property": "P1", "n": self.n, "verdict": self.verdict}
        if model is not None:
            out["model"] = model.spec()
        if self.feasible:
            out["coupling"] = [
                [s.to_json(), t.to_json(), format_rational(p)]
                for (s, t), p in self.coupling.items()
            ]
        else:
            out["witness"] = [t.to_json() for t in self.witness]
            out["mu_mass"] = format_rational(self.mu_mass)
            out["nu_mass"] = format_rational(self.nu_mass)
        return out


def _edge_map(mu: ConditionedDist, nu: ConditionedDist, model: OffspringModel) -> dict:
    dmax = model.degree_bound(nu.n)
    return {
        t: tuple(sorted(s for s in extensions(t, dmax) if s in nu.probs))
        for t in mu.probs
    }


def check_p1(model: OffspringModel, n: int) -> FlowResult:
    """Decide whether T_n and T_{n+1} admit a coupling with T_n inside T_{n+1}."""
    mu = conditioned_dist(model, n)
    nu = conditioned_dist(model, n + 1)
    edge_map = _edge_map(mu, nu, model)

    mu_items = list(mu.probs.items())
    nu_items = list(nu.probs.items())
    nu_index = {t: i for i, (t, _) in enumerate(nu_items)}
    scale = lcm(*(p.denominator for _, p in mu_items + nu_items))

    m, r = len(mu_items), len(nu_items)
    source, sink = 0, 1 + m + r
    net = _FlowNet(2 + m + r)
    inf = scale + 1
    bridge = {}  # (mu index, nu index) -> edge slot for flow extraction
    for i, (t, p) in enumerate(mu_items):
        net.add_edge(source, 1 + i, int(p * scale))
        for s in edge_map[t]:
            j = nu_index[s]
            bridge[(i, j)] = (1 + i, len(net.adj[1 + i]))
            net.add_edge(1 + i, 1 + m + j, inf)
    for j, (s, p) in enumerate(nu_items):
        net.add_edge(1 + m + j, sink, int(p * scale))

    flow = net.max_flow(source, sink)
    if flow == scale:
        coupling = {}
        for (i, j), (u, slot) in bridge.items():
            sent = inf - net.adj[u][slot][1]
            if sent > 0:
                coupling[(mu_items[i][0], nu_items[j][0])] = Fraction(sent, scale)
        _validate_coupling(coupling, mu, nu, edge_map)
        # feasibility forces profile monotonicity at this step; assert it
        for k, (a, b) in enumerate(zip(expected_profile(model, n, n),
                                       expected_profile(model, n + 1, n))):
            assert a <= b, f"feasible step but E W_{k} decreases at n={n}"
        return FlowResult(True, n, coupling=coupling)

    reached = net.reachable(source)
    witness = tuple(t for i, (t, _) in enumerate(mu_items) if 1 + i in reached)
    gamma = set()
    for t in witness:
        gamma.update(edge_map[t])
    mu_mass = sum((mu.probs[t] for t in witness), Fraction(0))
    nu_mass = sum((nu.probs[s] for s in gamma), Fraction(0))
    assert mu_mass > nu_mass, "min-cut witness fails Hall violation"
    return FlowResult(False, n, witness=witness, mu_mass=mu_mass, nu_mass=nu_mass)


def _validate_coupling(coupling: dict, mu: ConditionedDist, nu: ConditionedDist,
                       edge_map: dict) -> None:
    rows = {t: Fraction(0) for t in mu.probs}
    cols = {s: Fraction(0) for s in nu.probs}
    for (t, s), p in coupling.items():
        assert p > 0
        assert s in edge_map[t], "coupling mass off the insertion relation"
        rows[t] += p
        cols[s] += p
    assert rows == mu.probs, "row marginals differ from mu"
    assert cols == nu.probs, "column marginals differ from nu"


def hall_brute_force(model: OffspringModel, n: int):
    """Independent feasibility oracle: check Hall's condition on every subset.

    Returns (feasible, violator or None).  Enumerates all 2^m subsets A
    of supp(mu) with a subset-sum dynamic program over integer masses
    (numpy when it fits in int64), so it shares no code path with the
    max-flow decision.
    """
    mu = conditioned_dist(model, n)
    nu = conditioned_dist(model, n + 1)
    edge_map = _edge_map(mu, nu, model)
    mu_items = list(mu.probs.items())
    nu_items = list(nu.probs.items())
    nu_index = {t: i for i, (t, _) in enumerate(nu_items)}
    scale = lcm(*(p.denominator for _, p in mu_items + nu_items))
    mu_mass = [int(p * scale) for _, p in mu_items]
    nu_mass = [int(p * scale) for _, p in nu_items]
    masks = [sum(1 << nu_index[s] for s in edge_map[t]) for t, _ in mu_items]
    m = len(mu_items)

    if len(nu_items) <= 62 and scale < 2 ** 62:
        import numpy as np

        mu_arr = np.zeros(1 << m, dtype=np.int64)
        g_arr = np.zeros(1 << m, dtype=np.int64)
        for b in range(m):
            half = 1 << b
            view = mu_arr.reshape(-1, 2 * half)
            view[:, half:] = view[:, :half] + mu_mass[b]
            gview = g_arr.reshape(-1, 2 * half)
            gview[:, half:] = gview[:, :half] | masks[b]
        nu_of_gamma = np.zeros(1 << m, dtype=np.int64)
        for j, w in enumerate(nu_mass):
            nu_of_gamma += ((g_arr >> j) & 1) * w
        bad = np.nonzero(mu_arr > nu_of_gamma)[0]
        if bad.size == 0:
            return True, None
        subset = int(bad[0])
    else:
        subset = None
        for s in range(1, 1 << m):
            total = 0
            gamma = 0
            rest = s
            while rest:
                low = rest & -rest
                b = low.bit_length() - 1
                total += mu_mass[b]
                gamma |= masks[b]
                rest ^= low
            covered = sum(w for j, w in enumerate(nu_mass) if gamma >> j & 1)
            if total > covered:
                subset = s
                break
        if subset is None:
            return True, None

    violator = tuple(t for b, (t, _) in enumerate(mu_items) if subset >> b & 1)
    return False, violator


@dataclass
class GapResult:
    """Exact gap of a profile inequality; holds means gap >= 0."""

    holds: bool
    gap: Fraction

    @property
    def status(self) -> str:
        if self.gap > 0:
            return "holds"
        return "boundary" if self.gap == 0 else "fails"

    def to_json(self, prop: str, model: OffspringModel, n: int, k: int) -> dict:
        return {
            "property": prop,
            "model": model.spec(),
            "n": n,
            "k": k,
            "verdict": "holds" if self.holds else "fails",
            "gap": format_rational(self.gap),
        }


def check_pa(model: OffspringModel, n: int, k: int) -> GapResult:
    """Monotonicity in n: gap = E W_k(T_{n+1}) - E W_k(T_n)."""
    a = expected_profile(model, n, k)[k]
    b = expected_profile(model, n + 1, k)[k]
    return GapResult(b - a >= 0, b - a)


def check_pb(model: OffspringModel, n: int, k: int) -> GapResult:
    """Limit bound: gap = (1 + k * sigma^2) - E W_k(T_n)."""
    gap = 1 + k * _require_sigma2(model) - expected_profile(model, n, k)[k]
    return GapResult(gap >= 0, gap)


def _require_sigma2(model: OffspringModel) -> Fraction:
    if model.sigma2 is None:
        raise ValueError(f"{model.family} has no sigma^2 metadata")
    return model.sigma2


_CHECKS = {"pa": check_pa, "pb": check_pb}


def threshold_scan(prop: str, n: int, k: int, points) -> list:
    """Sign of the pa/pb gap over the epsilon family at each rational point."""
    if prop not in _CHECKS:
        raise ValueError(f"property must be pa or pb, got {prop!r}")
    check = _CHECKS[prop]
    rows = []
    for eps in points:
        eps = Fraction(eps)
        res = check(epsilon(eps), n, k)
        rows.append({"eps": eps, "gap": res.gap, "status": res.status})
    return rows


def threshold_bisect(prop: str, n: int, k: int, lo, hi, iterations: int = 40):
    """Bracket the gap's sign change over the epsilon family in (lo, hi).

    Returns (lo, hi, root): root is a rational where the gap is exactly 0
    if one is hit, else None with [lo, hi] a sign-changing bracket.  The
    probe point is the mediant of the reduced endpoints (Stern-Brocot
    descent), so a root with small numerator and denominator is reached
    exactly rather than approached by dyadic midpoints.
    """
    check = _CHECKS[prop]
    lo, hi = Fraction(lo), Fraction(hi)
    glo = check(epsilon(lo), n, k).gap
    ghi = check(epsilon(hi), n, k).gap
    if glo == 0:
        return lo, lo, lo
    if ghi == 0:
        return hi, hi, hi
    if (glo > 0) == (ghi > 0):
        raise ValueError(f"gap sign is constant on [{lo}, {hi}]")
    for _ in range(iterations):
        mid = Fraction(lo.numerator + hi.numerator,
                       lo.denominator + hi.denominator)
        gmid = check(epsilon(mid), n, k).gap
        if gmid == 0:
            return mid, mid, mid
        if (gmid > 0) == (glo > 0):
            lo, glo = mid, gmid
        else:
            hi = mid
    return lo, hi, None


def bound_scan(model: OffspringModel, kmax: int, nmax: int):
    """Max of E W_k(T_n) / k over 1 <= k <= kmax, 1 <= n <= nmax.

    Returns (maximum, (k, n)) with the exact rational maximum and the
    first grid point attaining it.
    """
    best = Fraction(0)
    arg = (1, 1)
    for n in range(1, nmax + 1):
        vec = expected_profile(model, n, min(kmax, n - 1))
        for k in range(1, kmax + 1):
            val = (vec[k] if k < len(vec) else Fraction(0)) / k
            if val > best:
                best = val
                arg = (k, n)
    return best, arg
