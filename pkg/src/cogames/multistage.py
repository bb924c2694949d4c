"""Multi-stage games: at every node all agents choose at once.

A node's successors are indexed by joint choices, tuples holding one label
per agent in the arena's agent order.  Only the type and a utility
assignment are provided here; no equilibrium notion is defined for these
games.

:func:`sequentialize` turns a multi-stage game into an ordinary one by
letting agents pick one after the other.  Later agents see earlier picks,
so equilibria of the result say nothing about the simultaneous game.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, Mapping

from .core import DEFAULT_NAT_SAMPLES, GameSystem, Leaf, Node, uassign, unfold_game
from .errors import ConstructionError, NaturalsNotSupported, UnboundedBranch


@dataclass(frozen=True)
class MSNode:
    branch: Any
    chosen: Any = None

    is_leaf = False
    joint = True
    agent = None

    def target(self, joint):
        if isinstance(self.branch, Mapping):
            return self.branch[joint]
        return self.branch(joint)


class MSGameSystem(GameSystem):
    """A multi-stage game; census only when every choice space is enumerated."""

    def _check_census_node(self, view, ref):
        if not self.arena.all_enumerated:
            raise ConstructionError(f"census state {ref!r}: joint choices over the naturals")

    def _check_view(self, view, ref):
        arena = self.arena
        if isinstance(view, Leaf):
            arena.check_payoff(view.payoff)
            return
        if not isinstance(view, MSNode):
            raise ConstructionError(f"state {ref!r} unfolds to {view!r}, not a Leaf or MSNode")
        if arena.all_enumerated:
            joints = arena.joint_choices()[0]
            if not isinstance(view.branch, Mapping) or set(view.branch) != set(joints):
                raise ConstructionError(f"multi-stage node {ref!r} must branch on every joint choice")
        elif not callable(view.branch):
            raise ConstructionError(f"multi-stage node {ref!r} needs a callable branch")
        if self.is_profile:
            self.check_joint(view.chosen, ref)
        elif view.chosen is not None:
            raise ConstructionError(f"game node {ref!r} carries a chosen joint choice")

    def check_joint(self, joint, ref=None):
        agents = self.arena.agents
        if not isinstance(joint, tuple) or len(joint) != len(agents):
            raise ConstructionError(f"node {ref!r}: {joint!r} is not a joint choice over {agents}")
        for a, c in zip(agents, joint):
            self.arena.check_choice(a, c)

    def labels(self, view, nat_samples=DEFAULT_NAT_SAMPLES):
        if not self.arena.all_enumerated and nat_samples is None:
            raise UnboundedBranch("joint choices over the naturals met with sampling disabled")
        return self.arena.joint_choices(nat_samples)


class MSStrategySystem(MSGameSystem):
    is_profile = True


def ms_unfold(g: MSGameSystem, depth: int, nat_samples=DEFAULT_NAT_SAMPLES):
    """Prefix tree whose branches are joint choices in lexicographic agent order."""
    return unfold_game(g, depth, nat_samples)


def ms_uassign(s: MSStrategySystem, fuel: int):
    return uassign(s, fuel)


def sequentialize(g: MSGameSystem, order=None) -> GameSystem:
    """Replace each simultaneous node by a chain of single-agent nodes.

    The agents move in ``order`` (default: arena order), every one of them,
    even those with a single choice.  Picks are accumulated along the chain
    and the last pick jumps to the successor of the assembled joint choice.
    """
    arena = g.arena
    if not arena.all_enumerated:
        raise NaturalsNotSupported("sequentialization needs enumerated choice spaces")
    g.require_census("sequentialization")
    order = tuple(arena.agents if order is None else order)
    if sorted(order) != sorted(arena.agents) or len(set(order)) != len(order):
        raise ConstructionError(f"{order!r} is not an ordering of the agents {arena.agents}")
    pos = {a: arena.index(a) for a in order}

    def assemble(picks):
        joint = [None] * len(order)
        for a, c in zip(order, picks):
            joint[pos[a]] = c
        return tuple(joint)

    states = {}
    for ref in g.census:
        view = g.unfold(ref)
        if view.is_leaf:
            states[("seq", ref, ())] = view
            continue
        for k, agent in enumerate(order):
            pools = [arena.space(a).labels for a in order[:k]]
            for picks in product(*pools):
                branch = {}
                for c in arena.space(agent).labels:
                    full = picks + (c,)
                    if k + 1 == len(order):
                        branch[c] = ("seq", view.branch[assemble(full)], ())
                    else:
                        branch[c] = ("seq", ref, full)
                states[("seq", ref, picks)] = Node(agent, branch)
    name = f"seq({g.name})" if g.name else ""
    return GameSystem.from_states(arena, ("seq", g.root, ()), states, name=name)


def play_sequence(g: GameSystem, labels) -> Any:
    """Follow ``labels`` from the root; returns the view reached."""
    ref = g.root
    for c in labels:
        ref = g.unfold(ref).target(c)
    return g.unfold(ref)


__all__ = ["MSNode", "MSGameSystem", "MSStrategySystem", "ms_unfold", "ms_uassign",
           "sequentialize", "play_sequence"]
