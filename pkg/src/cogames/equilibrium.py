"""Subgame perfect equilibria.

A profile is an SPE when it is always convergent and, at every node, the
owner weakly prefers the payoff of the chosen branch to the payoff of
*each* alternative branch.  With a partial preorder an incomparable
alternative is a violation, not something to skip.

On finite trees this is checked position by position.  On a finite state
graph the coinductive definition reduces to a local check at every
reachable state: once always-convergence holds, each subprofile's utility
assignment is fixed, the local condition at a state does not depend on
the path leading to it, and the greatest fixpoint of "local condition here
and SPE at every successor" over a finite graph is exactly the set of
states from which only locally-good states are reachable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Hashable

from .core import Assigned, Leaf, Node, StrategySystem, game_of, reachable, uassign
from .errors import NoMaximalChoice, NotFiniteTree, TooBroad
from .finiteness import is_always_convergent, is_finite_game, profile_count
from .verdict import Status, Verdict

BRUTE_FORCE_BOUND = 4096


class TieRule(enum.Enum):
    ALL_OPTIMA = "all"
    FIRST_OPTIMAL = "first"


@dataclass(frozen=True)
class SpeStep:
    """The local SPE condition at one node, with everything needed to replay it."""

    ref: Hashable
    agent: Any
    chosen: Any
    payoff: Any
    alternatives: tuple  # (label, payoff, pref holds)
    path: tuple | None = None


@dataclass(frozen=True)
class SpeCertificate:
    steps: tuple = ()

    def __len__(self):
        return len(self.steps)


@dataclass
class _Tree:
    """A finite game unfolded into positions named by their label paths."""

    arena: Any
    order: list = field(default_factory=list)  # preorder
    leaf: dict = field(default_factory=dict)
    node: dict = field(default_factory=dict)  # path -> (agent, labels)
    chosen: dict = field(default_factory=dict)
    ref: dict = field(default_factory=dict)


def _expand(s, limit=1_000_000) -> _Tree:
    v = is_finite_game(s)
    if v.status is not Status.HOLDS:
        raise NotFiniteTree(f"{s} does not unfold to a finite tree ({v.reason})")
    tree = _Tree(s.arena)
    stack = [((), s.root)]
    while stack:
        path, ref = stack.pop()
        tree.order.append(path)
        tree.ref[path] = ref
        if len(tree.order) > limit:
            raise NotFiniteTree(f"tree has more than {limit} positions")
        view = s.unfold(ref)
        if view.is_leaf:
            tree.leaf[path] = view.payoff
            continue
        labels = s.arena.space(view.agent).labels
        tree.node[path] = (view.agent, labels)
        if view.chosen is not None:
            tree.chosen[path] = view.chosen
        for c in reversed(labels):
            stack.append((path + (c,), view.target(c)))
    return tree


def _spe_violation(tree: _Tree, choices, steps=None):
    """First node (deepest first) violating the local condition, or None.

    Walks positions bottom-up so each node sees its children's payoffs.
    When ``steps`` is a list, a :class:`SpeStep` is appended per node.
    """
    arena = tree.arena
    pay = {}
    for pos in reversed(tree.order):
        if pos in tree.leaf:
            pay[pos] = tree.leaf[pos]
            continue
        agent, labels = tree.node[pos]
        c = choices[pos]
        mine = pay[pos + (c,)]
        pay[pos] = mine
        dom = arena.domain(agent)
        alts = []
        for alt in labels:
            other = pay[pos + (alt,)]
            ok = dom.pref(other[agent], mine[agent])
            if not ok:
                return pos, alt, other, mine
            if steps is not None:
                alts.append((alt, other, ok))
        if steps is not None:
            steps.append(SpeStep(tree.ref[pos], agent, c, mine, tuple(alts), pos))
    return None


def _violation_verdict(agent, chosen, alt, other, mine, where):
    reason = (f"at {where}, {agent} prefers {alt!r} ({other[agent]!r}) "
              f"over chosen {chosen!r} ({mine[agent]!r}) or cannot compare them")
    return Verdict.fails({"at": where, "agent": agent, "chosen": chosen, "alternative": alt,
                          "alternative_payoff": other, "chosen_payoff": mine}, reason)


def check_spe_finite(s) -> Verdict:
    """SPE check on a profile whose game is a finite tree.

    Raises :class:`NotFiniteTree` otherwise.  On Holds, ``data`` is an
    :class:`SpeCertificate` with one step per tree position (preorder).
    """
    tree = _expand(s)
    steps = []
    bad = _spe_violation(tree, tree.chosen, steps)
    if bad:
        pos, alt, other, mine = bad
        return _violation_verdict(tree.node[pos][0], tree.chosen[pos], alt, other, mine,
                                  f"path {list(pos)}")
    steps.reverse()
    return Verdict.holds(f"{len(steps)} nodes satisfy the local condition",
                         data=SpeCertificate(tuple(steps)))


def _fuel(s):
    return len(s.census) + 1 if s.has_census else 100_000


def check_spe_regular(s) -> Verdict:
    """SPE check on a finite-state profile, possibly cyclic.

    Holds iff the profile is always convergent and the local condition
    holds at every reachable node state.
    """
    s.require_census("the regular SPE check")
    ac = is_always_convergent(s)
    if ac.status is not Status.HOLDS:
        return Verdict.fails(ac.witness, f"not always convergent: {ac.reason}")
    fuel = _fuel(s)
    steps = []
    for ref in reachable(s):
        view = s.unfold(ref)
        if view.is_leaf:
            continue
        pays = {}
        for c in s.arena.space(view.agent).labels:
            res = uassign(s.at(view.target(c)), fuel)
            if not isinstance(res, Assigned):
                return Verdict.fails(res, f"no utility assignment below {ref!r} via {c!r}")
            pays[c] = res.payoff
        mine = pays[view.chosen]
        dom = s.arena.domain(view.agent)
        alts = []
        for c, other in pays.items():
            ok = dom.pref(other[view.agent], mine[view.agent])
            if not ok:
                return _violation_verdict(view.agent, view.chosen, c, other, mine, f"state {ref!r}")
            alts.append((c, other, ok))
        steps.append(SpeStep(ref, view.agent, view.chosen, mine, tuple(alts)))
    return Verdict.holds(f"{len(steps)} node states satisfy the local condition",
                         data=SpeCertificate(tuple(steps)))


def check_spe(s) -> Verdict:
    """Finite-tree check when it applies, the regular check otherwise."""
    if is_finite_game(s).status is Status.HOLDS:
        return check_spe_finite(s)
    return check_spe_regular(s)


def replay_certificate(s, cert: SpeCertificate) -> bool:
    """Recompute every recorded payoff and comparison from ``s`` itself."""
    fuel = _fuel(s)
    for step in cert.steps:
        view = s.unfold(step.ref)
        if view.is_leaf or view.agent != step.agent or view.chosen != step.chosen:
            return False
        if uassign(s.at(step.ref), fuel) != Assigned(step.payoff):
            return False
        dom = s.arena.domain(step.agent)
        seen = set()
        for label, payoff, ok in step.alternatives:
            if uassign(s.at(view.target(label)), fuel) != Assigned(payoff):
                return False
            if dom.pref(payoff[step.agent], step.payoff[step.agent]) != ok or not ok:
                return False
            seen.add(label)
        if seen != set(s.arena.space(step.agent).labels):
            return False
    return True


def _profile_from_choices(tree: _Tree, choices, name="") -> StrategySystem:
    states = {}
    for pos in tree.order:
        if pos in tree.leaf:
            states[pos] = Leaf(tree.leaf[pos])
        else:
            agent, labels = tree.node[pos]
            states[pos] = Node(agent, {c: pos + (c,) for c in labels}, choices[pos])
    return StrategySystem.from_states(tree.arena, (), states, name=name)


def choice_key(s) -> tuple:
    """Chosen label at every tree position, in preorder.

    Two profiles over the same finite game are bisimilar exactly when their
    keys are equal, which makes this the set-membership key for comparing
    solutions.
    """
    tree = _expand(s)
    return tuple((pos, tree.chosen[pos]) for pos in tree.order if pos in tree.node)


def backward_induction(g, tie: TieRule | str = TieRule.ALL_OPTIMA):
    """Solve a finite game leaf-up.

    A choice is kept at a node when the owner weakly prefers its payoff to
    every alternative's.  ``ALL_OPTIMA`` returns the list of every profile
    built that way (over every combination of subgame solutions);
    ``FIRST_OPTIMAL`` returns the single profile taking the first optimal
    label at every node.
    """
    tie = TieRule(tie)
    g = game_of(g)
    tree = _expand(g)
    first = tie is TieRule.FIRST_OPTIMAL

    def solve(pos):
        if pos in tree.leaf:
            return [((), tree.leaf[pos])]
        agent, labels = tree.node[pos]
        dom = tree.arena.domain(agent)
        subs = [solve(pos + (c,)) for c in labels]
        if first:
            subs = [sub[:1] for sub in subs]
        out = []
        for combo in product(*subs):
            pays = [p for _, p in combo]
            merged = tuple(x for ch, _ in combo for x in ch)
            for i, c in enumerate(labels):
                if all(dom.pref(q[agent], pays[i][agent]) for q in pays):
                    out.append((merged + ((pos, c),), pays[i]))
                    if first:
                        break
            if first and out:
                break
        if not out:
            raise NoMaximalChoice(f"no choice of {agent} at path {list(pos)} dominates all others")
        return out

    sols = solve(())
    if first:
        return _profile_from_choices(tree, dict(sols[0][0]), name="backward-induction")
    nodes = [pos for pos in tree.order if pos in tree.node]
    keyed = sorted((tuple(dict(ch)[pos] for pos in nodes), dict(ch)) for ch, _ in sols)
    return [_profile_from_choices(tree, ch, name="backward-induction") for _, ch in keyed]


def enumerate_spe_bruteforce(g, bound=BRUTE_FORCE_BOUND) -> list:
    """Every profile of a finite game, filtered by the SPE definition.

    Independent of :func:`backward_induction`; intended as its oracle.
    """
    g = game_of(g)
    tree = _expand(g)
    count = profile_count(g)
    if count > bound:
        raise TooBroad(f"{count} profiles exceed the bound {bound}")
    nodes = [pos for pos in tree.order if pos in tree.node]
    pools = [tree.node[pos][1] for pos in nodes]
    out = []
    for combo in product(*pools):
        choices = dict(zip(nodes, combo))
        if _spe_violation(tree, choices) is None:
            out.append(_profile_from_choices(tree, choices, name="brute-force"))
    return out
