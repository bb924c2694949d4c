"""Finiteness and convergence predicates.

Census systems get exact answers from their state graph: a finite
reachable graph without cycles unfolds to a finite tree, and a cycle is an
infinite history.  Programmatic systems are explored under a budget and
answer Unknown when it runs out; naturals-indexed nodes are never
enumerable, so predicates quantifying over all their branches fall back on
the analytic facts a gallery family carries.
"""
from __future__ import annotations

import math
import sys
from collections import deque

from .core import DEFAULT_NAT_SAMPLES, Assigned, chosen_path, game_of, reachable, uassign
from .errors import UnboundedBranch
from .verdict import Status, Verdict

DEFAULT_BUDGET = 100_000


def _find_cycle(g):
    """A cycle in the canonical state graph of a census system, or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {}
    root = g.canon(g.root)[0]
    stack = [(root, iter(_succ(g, root)))]
    path = [root]
    colour[root] = GREY
    while stack:
        ref, it = stack[-1]
        for label, tgt in it:
            c = colour.get(tgt, WHITE)
            if c == GREY:
                i = path.index(tgt)
                return path[i:]
            if c == WHITE:
                colour[tgt] = GREY
                path.append(tgt)
                stack.append((tgt, iter(_succ(g, tgt))))
                break
        else:
            colour[ref] = BLACK
            path.pop()
            stack.pop()
    return None


def _succ(g, ref):
    view = g.unfold(ref)
    if view.is_leaf:
        return ()
    labels, _ = g.labels(view, None)
    return [(c, g.canon(view.target(c))[0]) for c in labels]


def _explore_tree(g, budget):
    """Depth-first walk of a programmatic game as a tree.

    Returns ("naturals", path) at the first naturals-indexed node,
    ("cycle", refs) when a hashable state recurs on the current branch,
    ("budget", visited) when more than ``budget`` positions were needed,
    or ("finite", visited).  Subtrees already known to be finite are not
    re-walked.
    """
    finite = set()
    visited = 0

    def go(ref, path, on_path):
        nonlocal visited
        try:
            if ref in finite:
                return None
            hashable = True
        except TypeError:
            hashable = False
        visited += 1
        if visited > budget:
            return ("budget", visited)
        view = g.unfold(ref)
        if view.is_leaf:
            if hashable:
                finite.add(ref)
            return None
        try:
            labels, _ = g.labels(view, None)
        except UnboundedBranch:
            return ("naturals", path)
        if hashable:
            if ref in on_path:
                refs = list(on_path)
                return ("cycle", refs[refs.index(ref):])
            on_path[ref] = None
        for c in labels:
            out = go(view.target(c), path + (c,), on_path)
            if out:
                return out
        if hashable:
            del on_path[ref]
            finite.add(ref)
        return None

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000))
    try:
        out = go(g.root, (), {})
    except RecursionError:
        out = ("budget", visited)
    finally:
        sys.setrecursionlimit(limit)
    return out or ("finite", visited)


def is_finite_game(g, budget=DEFAULT_BUDGET) -> Verdict:
    """Does ``g`` unfold to a finite tree?"""
    g = game_of(g)
    if g.has_census:
        cycle = _find_cycle(g)
        if cycle:
            return Verdict.fails(("cycle", tuple(cycle)), f"cycle of length {len(cycle)}")
        return Verdict.holds("acyclic finite state graph")
    kind, info = _explore_tree(g, budget)
    if kind == "naturals":
        return Verdict.fails(("naturals", info), f"naturals-indexed branching at path {list(info)}")
    if kind == "cycle":
        return Verdict.fails(("cycle", tuple(info)), f"cycle of length {len(info)}")
    if kind == "budget":
        return Verdict.unknown(info, f"exploration budget of {budget} positions exhausted")
    return Verdict.holds(f"explored {info} positions")


def profile_count(g) -> int:
    """Number of strategy profiles on a game that unfolds to a finite tree.

    The product over tree positions of the owner's number of choices;
    shared census states count once per position they occupy.
    """
    g = game_of(g)
    memo = {}

    def count(ref):
        if ref in memo:
            return memo[ref]
        view = g.unfold(ref)
        if view.is_leaf:
            n = 1
        else:
            labels, _ = g.labels(view, None)
            n = len(labels) * math.prod(count(view.target(c)) for c in labels)
        memo[ref] = n
        return n

    return count(g.root)


def is_finitely_broad(g, budget=DEFAULT_BUDGET) -> Verdict:
    """Finitely many profiles; on Holds, ``data`` is their number."""
    v = is_finite_game(g, budget)
    if v.status is Status.HOLDS:
        return Verdict.holds(v.reason, data=profile_count(g))
    if v.status is Status.FAILS and v.witness[0] == "naturals":
        return Verdict.fails(v.witness, "infinitely many choices at a node give infinitely many profiles")
    return Verdict(v.status, v.witness, v.reason)


def is_finite_history_game(g, budget=DEFAULT_BUDGET) -> Verdict:
    """Is every history of ``g`` finite?"""
    g = game_of(g)
    if g.has_census:
        cycle = _find_cycle(g)
        if cycle:
            return Verdict.fails(("cycle", tuple(cycle)), "a cycle yields an infinite history")
        return Verdict.holds("acyclic finite state graph")
    if "finite_history" in g.facts:
        return Verdict.holds(f"analytic: {g.facts['finite_history']}")
    kind, info = _explore_tree(g, budget)
    if kind == "cycle":
        return Verdict.fails(("cycle", tuple(info)), "a cycle yields an infinite history")
    if kind == "naturals":
        return Verdict.unknown(0, "naturals-indexed branching cannot be enumerated")
    if kind == "budget":
        return Verdict.unknown(info, f"exploration budget of {budget} positions exhausted")
    return Verdict.holds(f"explored {info} positions")


def is_finite_profile(s, budget=DEFAULT_BUDGET) -> Verdict:
    return is_finite_game(game_of(s), budget)


def is_finite_history_profile(s, budget=DEFAULT_BUDGET) -> Verdict:
    return is_finite_history_game(game_of(s), budget)


def _default_fuel(s, fuel):
    if fuel is not None:
        return fuel
    return len(s.census) + 1 if s.has_census else 10_000


def is_convergent(s, fuel=None) -> Verdict:
    """Does the chosen path from the root reach a leaf?"""
    fuel = _default_fuel(s, fuel)
    tr = chosen_path(s, fuel)
    if tr.end == "leaf":
        return Verdict.holds(f"leaf after {len(tr.steps)} moves", data=tr)
    if tr.end == "lasso":
        period = len(tr.steps) - tr.loop_start
        return Verdict.fails(tr, f"chosen path loops with period {period}")
    return Verdict.unknown(fuel, f"no leaf within {fuel} moves")


def always(s, local, budget=DEFAULT_BUDGET, nat_samples=DEFAULT_NAT_SAMPLES) -> Verdict:
    """Does ``local`` hold at every node reachable from the root (any branch)?

    Leaves satisfy the modality unconditionally.  ``local`` receives the
    subprofile rooted at a node and returns a Verdict.  On a census system
    every reachable state is checked; otherwise the search is breadth-first,
    samples naturals-indexed nodes, and answers Unknown when truncated.
    """
    if s.has_census:
        refs, truncated = [r for r in reachable(s) if not s.unfold(r).is_leaf], False
    else:
        refs, truncated = _bounded_nodes(s, budget, nat_samples)
    unknown = None
    for ref in refs:
        v = local(s.at(ref))
        if v.status is Status.FAILS:
            return Verdict.fails((ref, v), f"fails at state {ref!r}: {v.reason}")
        if v.status is Status.UNKNOWN and unknown is None:
            unknown = (ref, v)
    if unknown is not None:
        return Verdict.unknown(unknown, f"undecided at state {unknown[0]!r}")
    if truncated:
        return Verdict.unknown(len(refs), "reachable states not exhausted")
    return Verdict.holds(f"{len(refs)} node states")


def _bounded_nodes(s, budget, nat_samples):
    out = []
    seen = set()
    queue = deque([s.root])
    truncated = False
    while queue:
        ref = queue.popleft()
        try:
            if ref in seen:
                continue
            seen.add(ref)
        except TypeError:
            pass
        view = s.unfold(ref)
        if view.is_leaf:
            continue
        if len(out) >= budget:
            return out, True
        out.append(ref)
        labels, elided = s.labels(view, nat_samples)
        truncated |= elided
        queue.extend(view.target(c) for c in labels)
    return out, truncated


def is_always_convergent(s, fuel=None, budget=DEFAULT_BUDGET) -> Verdict:
    """Convergence at every subprofile."""
    return always(s, lambda t: is_convergent(t, _default_fuel(s, fuel)), budget)


def existence_uassign_check(s, fuel=None) -> Verdict:
    """Convergent implies a utility assignment exists, checked on ``s``."""
    fuel = _default_fuel(s, fuel)
    conv = is_convergent(s, fuel)
    if conv.status is not Status.HOLDS:
        return Verdict.holds("vacuous: not known to converge")
    res = uassign(s, fuel)
    if isinstance(res, Assigned):
        return Verdict.holds(f"assigned {res.payoff}")
    return Verdict.fails(res, "convergent profile without a utility assignment")
