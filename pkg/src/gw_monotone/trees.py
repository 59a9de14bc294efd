"""Plane trees as canonical preorder outdegree codes.

A rooted ordered tree on n vertices is stored as the sequence of
outdegrees (d_1, ..., d_n) read off in depth-first preorder.  Equality,
hashing and ordering are plain tuple comparison, so the encoding is
canonical.  All operations here are exact and deterministic.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional


class InvalidTreeError(ValueError):
    """Raised when an outdegree sequence is not a valid preorder code."""


class PlaneTree:
    """Immutable rooted ordered tree, identified by its outdegree code."""

    __slots__ = ("code",)

    def __init__(self, code: Iterable[int]):
        code = tuple(code)
        n = len(code)
        if n == 0:
            raise InvalidTreeError("empty outdegree code")
        total = 0
        for k, d in enumerate(code, start=1):
            if not isinstance(d, int) or d < 0:
                raise InvalidTreeError(f"outdegree must be a nonnegative int, got {d!r}")
            total += d
            if k < n and total < k:
                raise InvalidTreeError(f"prefix of length {k} closes the tree early: {code}")
        if total != n - 1:
            raise InvalidTreeError(f"outdegrees sum to {total}, expected {n - 1}: {code}")
        self.code = code

    @property
    def size(self) -> int:
        return len(self.code)

    def __eq__(self, other) -> bool:
        return isinstance(other, PlaneTree) and self.code == other.code

    def __hash__(self) -> int:
        return hash(self.code)

    def __lt__(self, other: "PlaneTree") -> bool:
        return self.code < other.code

    def __le__(self, other: "PlaneTree") -> bool:
        return self.code <= other.code

    def __repr__(self) -> str:
        return f"PlaneTree({self.code})"

    def to_json(self) -> list:
        return list(self.code)

    @classmethod
    def from_json(cls, data: Iterable[int]) -> "PlaneTree":
        return cls(data)


def _to_nested(code: tuple) -> list:
    """Decode a preorder outdegree code into nested child lists."""
    pos = 0

    def build() -> list:
        nonlocal pos
        d = code[pos]
        pos += 1
        return [build() for _ in range(d)]

    root = build()
    if pos != len(code):
        raise InvalidTreeError(f"trailing entries in code {code}")
    return root


def _encode(root: list) -> tuple:
    out: list = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(len(node))
        stack.extend(reversed(node))
    return tuple(out)


def profile(t: PlaneTree) -> tuple:
    """Level counts (W_0, W_1, ..., W_depth): vertices at each root distance."""
    counts: list = []
    stack: list = []  # unfinished child quotas of the open ancestors
    for d in t.code:
        depth = len(stack)
        if depth == len(counts):
            counts.append(0)
        counts[depth] += 1
        stack.append(d)
        while stack and stack[-1] == 0:
            stack.pop()
            if stack:
                stack[-1] -= 1
    return tuple(counts)


def enumerate_trees(n: int, dmax: Optional[int] = None) -> list:
    """All plane trees with n vertices and outdegrees <= dmax, sorted by code.

    dmax=None means unbounded (the count is then the Catalan number C_{n-1}).
    Generation works directly on valid codes, pruning by the remaining
    vertex budget, so small dmax never pays the unbounded enumeration cost.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bound = n - 1 if dmax is None else min(dmax, n - 1)
    out: list = []
    code: list = []

    def rec(rem: int, pending: int) -> None:
        if rem == 0:
            out.append(PlaneTree(tuple(code)))
            return
        # pending open slots must all be fillable by the remaining vertices
        for d in range(0, bound + 1):
            new_pending = pending - 1 + d
            if new_pending > rem - 1:
                break
            if rem - 1 > 0 and new_pending < 1:
                continue
            if rem - 1 == 0 and new_pending != 0:
                continue
            code.append(d)
            rec(rem - 1, new_pending)
            code.pop()

    rec(n, 1)
    return out


def _iter_nodes(root: list) -> Iterator[list]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node)


def extensions(t: PlaneTree, dmax: Optional[int] = None) -> set:
    """All trees of size n+1 reachable by inserting one leaf at a gap.

    A tree of size n has 2n-1 gaps (one per child slot, parent outdegrees
    counted with the new position); coinciding results are de-duplicated.
    Insertions raising an outdegree above dmax are skipped.
    """
    root = _to_nested(t.code)
    results: set = set()
    for node in _iter_nodes(root):
        if dmax is not None and len(node) + 1 > dmax:
            continue
        for pos in range(len(node) + 1):
            node.insert(pos, [])
            results.add(PlaneTree(_encode(root)))
            node.pop(pos)
    return results


def deletions(t: PlaneTree) -> set:
    """All trees obtained from t by removing one leaf (inverse of extensions)."""
    if t.size < 2:
        raise ValueError("cannot delete a leaf from the single-vertex tree")
    root = _to_nested(t.code)
    results: set = set()
    for node in _iter_nodes(root):
        for pos, child in enumerate(node):
            if not child:
                removed = node.pop(pos)
                results.add(PlaneTree(_encode(root)))
                node.insert(pos, removed)
    return results


def insertion_relation(n: int, dmax: Optional[int] = None) -> dict:
    """Leaf-insertion relation between sizes n and n+1.

    Maps each size-n tree to the sorted tuple of its size-(n+1) extensions;
    (t, t') is related exactly when t arises from t' by deleting one leaf.
    """
    return {t: tuple(sorted(extensions(t, dmax))) for t in enumerate_trees(n, dmax)}
