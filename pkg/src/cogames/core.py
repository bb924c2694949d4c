"""Games and strategy profiles as coalgebras.

A system is a root state plus an ``unfold`` function mapping each state
reference to a one-step view: a :class:`Leaf` carrying a payoff, or a
:class:`Node` owned by an agent with one successor per choice.  Profiles
are the same thing with a ``chosen`` label at every node.  Infinite games
are simply systems whose unfolding never bottoms out.

Two flavours exist:

* census systems list every reachable state up front.  All their analyses
  are exact.
* programmatic systems only expose ``unfold``; they admit bounded analyses,
  and may use naturals-indexed choice spaces.

A census system may also carry a *quotient*: a map ``ref -> (canonical_ref,
offset)`` stating that the subgame at ``ref`` is the subgame at
``canonical_ref`` with every payoff shifted by the integer ``offset``.
This is how stage-indexed families such as the dollar auction get a finite
census.  It is only accepted when every agent's preorder is invariant
under translation, so that comparisons made at canonical states hold at
all their translates.
"""
from __future__ import annotations

import copy
import dataclasses
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Mapping

from .arena import ArenaSpec, Enumerated, Naturals, Payoff
from .errors import ArenaMismatch, ConstructionError, NoCensus, UnboundedBranch

DEFAULT_NAT_SAMPLES = 8


@dataclass(frozen=True)
class Leaf:
    payoff: Payoff

    is_leaf = True


@dataclass(frozen=True)
class Node:
    """A position owned by ``agent``.

    ``branch`` maps labels to successor refs: a mapping for enumerated
    choice spaces, a callable for the naturals.  ``chosen`` is None in a
    game and the owner's choice in a profile.
    """

    agent: Any
    branch: Any
    chosen: Any = None

    is_leaf = False

    def target(self, label):
        if isinstance(self.branch, Mapping):
            return self.branch[label]
        return self.branch(label)


def _label_pool(space, nat_samples):
    if isinstance(space, Naturals):
        if nat_samples is None:
            raise UnboundedBranch("naturals-indexed node met with sampling disabled")
        return space.sample(nat_samples)
    return space.labels, False


@dataclass(frozen=True, eq=False)
class GameSystem:
    """A possibly infinite extensive game, presented as a coalgebra."""

    arena: ArenaSpec
    root: Hashable
    unfold_fn: Callable[[Hashable], Any] = field(repr=False)
    census: tuple | None = None
    quotient: Callable[[Hashable], tuple] | None = field(default=None, repr=False)
    name: str = ""
    facts: Mapping[str, str] = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    is_profile = False

    def __post_init__(self):
        if self.census is None:
            if self.quotient is not None:
                raise ConstructionError("a quotient needs a census of canonical states")
            return
        object.__setattr__(self, "census", tuple(self.census))
        members = frozenset(self.census)
        object.__setattr__(self, "_members", members)
        if self.quotient is not None and not self.arena.translation_invariant:
            raise ConstructionError("payoff translation needs integer utilities with translation-invariant preorders")
        for ref in self.census:
            view = self.unfold_fn(ref)
            self._check_view(view, ref)
            if not view.is_leaf:
                self._check_census_node(view, ref)
                for label in _successor_labels(self, view):
                    tgt = self.canon(view.branch[label])[0]
                    if tgt not in members:
                        raise ConstructionError(f"state {ref!r} branches via {label!r} outside the census to {tgt!r}")
        if self.canon(self.root)[0] not in members:
            raise ConstructionError(f"root {self.root!r} is not in the census")

    @classmethod
    def from_states(cls, arena, root, states: Mapping, name="", facts=None):
        """Finite-state system whose states are the keys of ``states``."""
        states = dict(states)

        def lookup(ref):
            try:
                return states[ref]
            except (KeyError, TypeError):
                raise ConstructionError(f"unknown state {ref!r}") from None

        return cls(arena, root, lookup, tuple(states), name=name, facts=dict(facts or {}))

    @classmethod
    def programmatic(cls, arena, root, unfold_fn, name="", facts=None):
        return cls(arena, root, unfold_fn, None, name=name, facts=dict(facts or {}))

    def _check_census_node(self, view, ref):
        if not isinstance(self.arena.space(view.agent), Enumerated):
            raise ConstructionError(f"census state {ref!r} has a naturals-indexed owner")

    def _check_view(self, view, ref):
        arena = self.arena
        if isinstance(view, Leaf):
            arena.check_payoff(view.payoff)
            return
        if not isinstance(view, Node):
            raise ConstructionError(f"state {ref!r} unfolds to {view!r}, not a Leaf or Node")
        space = arena.space(view.agent)
        if isinstance(space, Enumerated):
            if not isinstance(view.branch, Mapping) or set(view.branch) != set(space.labels):
                raise ConstructionError(
                    f"node {ref!r} of {view.agent!r} must branch on exactly {space.labels!r}")
        elif not callable(view.branch):
            raise ConstructionError(f"node {ref!r} has a naturals space and needs a callable branch")
        if self.is_profile:
            if view.chosen is None:
                raise ConstructionError(f"profile node {ref!r} has no chosen choice")
            arena.check_choice(view.agent, view.chosen)
        elif view.chosen is not None:
            raise ConstructionError(f"game node {ref!r} carries a chosen choice")

    @property
    def has_census(self) -> bool:
        return self.census is not None

    @property
    def translated(self) -> bool:
        return self.quotient is not None

    def canon(self, ref) -> tuple:
        if self.quotient is None:
            return ref, 0
        return self.quotient(ref)

    def unfold(self, ref=None):
        ref = self.root if ref is None else ref
        view = self.unfold_fn(ref)
        if self.census is None or ref not in self._members:
            self._check_view(view, ref)
        return view

    def at(self, ref):
        """The subsystem rooted at ``ref``."""
        if self.census is not None and self.canon(ref)[0] not in self._members:
            raise ConstructionError(f"state {ref!r} is not in the census")
        sub = copy.copy(self)
        object.__setattr__(sub, "root", ref)
        return sub

    def labels(self, view, nat_samples=DEFAULT_NAT_SAMPLES):
        """Labels to explore at ``view`` and whether the list was truncated."""
        return _label_pool(self.arena.space(view.agent), nat_samples)

    def require_census(self, what="this analysis"):
        if self.census is None:
            raise NoCensus(f"{what} needs a finite-state system with a census")

    def __str__(self):
        return self.name or f"<{type(self).__name__} root={self.root!r}>"


class StrategySystem(GameSystem):
    """A strategy profile: a game whose every node records the owner's choice."""

    is_profile = True


def leaf_game(arena: ArenaSpec, payoff: Payoff) -> GameSystem:
    return GameSystem.from_states(arena, "leaf", {"leaf": Leaf(payoff)})


def leaf_profile(arena: ArenaSpec, payoff: Payoff) -> StrategySystem:
    return StrategySystem.from_states(arena, "leaf", {"leaf": Leaf(payoff)})


@dataclass(frozen=True)
class PLeaf:
    payoff: Payoff
    ref: Hashable


@dataclass(frozen=True)
class PNode:
    agent: Any
    ref: Hashable
    children: tuple
    chosen: Any = None
    elided: bool = False


@dataclass(frozen=True)
class Continuation:
    ref: Hashable


def reachable(system) -> list:
    """Canonical states reachable from the root, breadth-first in label order."""
    system.require_census("reachability")
    start = system.canon(system.root)[0]
    key = ("reachable", start)
    if key in system._cache:
        return system._cache[key]
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        ref = queue.popleft()
        view = system.unfold(ref)
        if view.is_leaf:
            continue
        for label in _successor_labels(system, view):
            tgt = system.canon(view.target(label))[0]
            if tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
                queue.append(tgt)
    system._cache[key] = order
    return order


def _successor_labels(system, view):
    if getattr(view, "joint", False):
        return system.arena.joint_choices()[0]
    return system.arena.space(view.agent).labels


def unfold_game(g, depth: int, nat_samples=DEFAULT_NAT_SAMPLES):
    """Observe ``g`` down to ``depth`` moves.

    Leaves are always shown; a node met with no depth left becomes a
    :class:`Continuation` carrying its ref so that unfolding can resume.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")

    def go(ref, d):
        view = g.unfold(ref)
        if view.is_leaf:
            return PLeaf(view.payoff, ref)
        if d == 0:
            return Continuation(ref)
        labels, elided = g.labels(view, nat_samples)
        kids = tuple((c, go(view.target(c), d - 1)) for c in labels)
        return PNode(view.agent, ref, kids, view.chosen, elided)

    return go(g.root, depth)


def restrict(tree, depth: int):
    """Cut a prefix tree back to ``depth`` moves."""
    if isinstance(tree, PNode):
        if depth == 0:
            return Continuation(tree.ref)
        kids = tuple((c, restrict(t, depth - 1)) for c, t in tree.children)
        return PNode(tree.agent, tree.ref, kids, tree.chosen, tree.elided)
    return tree


def with_pref(system, pref_kind):
    """The same system over an arena whose every preorder is ``pref_kind``."""
    arena = system.arena.with_pref(pref_kind)
    if system.translated and not arena.translation_invariant:
        raise ConstructionError("payoff translation needs translation-invariant preorders")
    out = copy.copy(system)
    object.__setattr__(out, "arena", arena)
    object.__setattr__(out, "_cache", {})
    return out


def _erase(view):
    if view.is_leaf:
        return view
    return Node(view.agent, view.branch)


def game_of(s) -> GameSystem:
    """Erase the chosen choices of a profile; games are returned unchanged."""
    if not s.is_profile:
        return s
    return GameSystem(s.arena, s.root, lambda ref: _erase(s.unfold_fn(ref)), s.census,
                      s.quotient, name=f"game({s.name})" if s.name else "", facts=dict(s.facts))


@dataclass(frozen=True)
class EqualUpTo:
    depth: int

    equal = True


@dataclass(frozen=True)
class DifferAt:
    path: tuple
    reason: str = ""

    equal = False


def _local_mismatch(v1, v2, payoff_delta=0):
    if v1.is_leaf != v2.is_leaf:
        return "leaf against node"
    if v1.is_leaf:
        if v1.payoff.shift(payoff_delta) != v2.payoff:
            return f"payoffs {v1.payoff} and {v2.payoff} differ"
        return None
    if v1.agent != v2.agent:
        return f"owners {v1.agent!r} and {v2.agent!r} differ"
    if v1.chosen != v2.chosen:
        return f"chosen {v1.chosen!r} and {v2.chosen!r} differ"
    return None


def _same_arena(g1, g2):
    if g1.arena != g2.arena:
        raise ArenaMismatch("the two systems live in different arenas")


def bisim_bounded(g1, g2, depth: int, nat_samples=DEFAULT_NAT_SAMPLES):
    """Compare the depth-``depth`` unfoldings of two systems.

    Returns :class:`EqualUpTo` or the shortest, then lexicographically
    least, :class:`DifferAt` path.  Naturals-indexed nodes are compared on
    their first ``nat_samples`` branches; pass ``nat_samples=None`` to make
    that an :class:`UnboundedBranch` error instead.  Profiles are compared
    including their chosen choices.
    """
    _same_arena(g1, g2)
    level = [((), g1.root, g2.root)]
    seen = set()
    for k in range(depth + 1):
        nxt = []
        for path, r1, r2 in level:
            try:
                key = (r1, r2)
                if key in seen:
                    continue
                seen.add(key)
            except TypeError:
                pass
            v1, v2 = g1.unfold(r1), g2.unfold(r2)
            if k == depth and not v1.is_leaf and not v2.is_leaf:
                continue  # both are continuations at the frontier
            why = _local_mismatch(v1, v2)
            if why:
                return DifferAt(path, why)
            if v1.is_leaf:
                continue
            labels, _ = g1.labels(v1, nat_samples)
            for c in labels:
                nxt.append((path + (c,), v1.target(c), v2.target(c)))
        level = nxt
        if not level:
            break
    return EqualUpTo(depth)


def _initial_key(view):
    if view.is_leaf:
        return ("leaf", view.payoff)
    return ("node", view.agent, view.chosen)


def _partition_refinement(systems) -> dict:
    """Coarsest bisimulation on the disjoint union of census systems.

    Blocks start as (leaf payoff | owner, chosen) classes and are split by
    the tuple of successor blocks until stable.
    """
    states = [(i, r) for i, s in enumerate(systems) for r in s.census]
    views = {(i, r): systems[i].unfold(r) for i, r in states}
    succ = {}
    for (i, r), v in views.items():
        if not v.is_leaf:
            succ[(i, r)] = tuple((i, v.branch[c]) for c in _successor_labels(systems[i], v))
    ids = {}
    block = {st: ids.setdefault(_initial_key(views[st]), len(ids)) for st in states}
    count = len(ids)
    while True:
        ids = {}
        new = {}
        for st in states:
            sig = (block[st], tuple(block[t] for t in succ.get(st, ())))
            new[st] = ids.setdefault(sig, len(ids))
        block = new
        if len(ids) == count:
            return block
        count = len(ids)


def _bisim_lockstep(g1, g2, cap):
    """Bisimilarity for systems with a payoff-translation quotient.

    Explores pairs (canonical1, canonical2, relative offset) reachable in
    lockstep; the reached set is a bisimulation iff no pair mismatches.
    """
    (c1, o1), (c2, o2) = g1.canon(g1.root), g2.canon(g2.root)
    start = (c1, c2, o1 - o2)
    seen = {start}
    stack = [start]
    while stack:
        c1, c2, delta = stack.pop()
        v1, v2 = g1.unfold(c1), g2.unfold(c2)
        if _local_mismatch(v1, v2, delta):
            return False
        if v1.is_leaf:
            continue
        for label in _successor_labels(g1, v1):
            t1, u1 = g1.canon(v1.branch[label])
            t2, u2 = g2.canon(v2.branch[label])
            key = (t1, t2, delta + u1 - u2)
            if key not in seen:
                if len(seen) >= cap:
                    raise UnboundedBranch(f"lockstep bisimulation exceeded {cap} state pairs")
                seen.add(key)
                stack.append(key)
    return True


def bisim_exact(g1, g2, cap=100_000) -> bool:
    """Decide bisimilarity of two census systems (games or profiles)."""
    g1.require_census("exact bisimulation")
    g2.require_census("exact bisimulation")
    _same_arena(g1, g2)
    if g1.is_profile != g2.is_profile:
        raise TypeError("cannot compare a game with a strategy profile")
    if g1.translated or g2.translated:
        return _bisim_lockstep(g1, g2, cap)
    block = _partition_refinement([g1, g2])
    return block[(0, g1.root)] == block[(1, g2.root)]


def minimize(g):
    """Bisimulation quotient of a census system without payoff translation.

    Each class of reachable states is represented by its first member in
    breadth-first order; the result is bisimilar to ``g``.
    """
    g.require_census("minimization")
    if g.translated:
        raise NoCensus("minimization of payoff-translated families is not supported")
    block = _partition_refinement([g])
    rep = {}
    for r in reachable(g):
        rep.setdefault(block[(0, r)], r)
    states = {}
    for r in rep.values():
        v = g.unfold(r)
        if not v.is_leaf:
            v = dataclasses.replace(v, branch={c: rep[block[(0, t)]] for c, t in v.branch.items()})
        states[r] = v
    return type(g).from_states(g.arena, rep[block[(0, g.root)]], states, name=g.name, facts=g.facts)


@dataclass(frozen=True)
class Step:
    ref: Hashable
    agent: Any
    chosen: Any


@dataclass(frozen=True)
class Trace:
    """The history induced by a profile's choices.

    ``end`` is ``"leaf"`` (then ``payoff`` is set), ``"lasso"`` (the state
    at ``steps[loop_start]`` recurs) or ``"exhausted"``.
    """

    steps: tuple
    end: str
    payoff: Payoff | None = None
    loop_start: int | None = None


@dataclass(frozen=True)
class Assigned:
    payoff: Payoff


@dataclass(frozen=True)
class DivergenceDetected:
    stem: tuple
    cycle: tuple
    repeated: Hashable

    @property
    def period(self):
        return len(self.cycle)


@dataclass(frozen=True)
class FuelExhausted:
    path: tuple


def chosen_path(s, fuel: int) -> Trace:
    """Follow the chosen choices from the root for at most ``fuel`` moves.

    A lasso is reported when a (canonical) state repeats; states that are
    not hashable simply disable that detection.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    seen = {}
    steps = []
    ref = s.root
    while True:
        try:
            key = s.canon(ref)[0]
            if key in seen:
                return Trace(tuple(steps), "lasso", loop_start=seen[key])
        except TypeError:
            key = None
        view = s.unfold(ref)
        if view.is_leaf:
            return Trace(tuple(steps), "leaf", payoff=view.payoff)
        if len(steps) == fuel:
            return Trace(tuple(steps), "exhausted")
        if key is not None:
            seen[key] = len(steps)
        steps.append(Step(ref, view.agent, view.chosen))
        ref = view.target(view.chosen)


def uassign(s, fuel: int):
    """Utility assignment, totalized: Assigned, DivergenceDetected or FuelExhausted."""
    tr = chosen_path(s, fuel)
    if tr.end == "leaf":
        return Assigned(tr.payoff)
    if tr.end == "lasso":
        i = tr.loop_start
        return DivergenceDetected(tr.steps[:i], tr.steps[i:], tr.steps[i].ref)
    return FuelExhausted(tr.steps)
