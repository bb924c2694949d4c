"""Escalation: divergent profiles made of locally rational choices.

A node's choice is *good* when some subgame perfect equilibrium of the
same subgame takes that choice at the node.  A profile escalates when it
diverges and every node on its chosen path is good.

Witness equilibria are searched for in a finite class over the
bisimulation quotient of the subgame: memoryless profiles (one choice per
state), or optionally profiles with up to ``m`` memory states.  Working
on the quotient makes the answer independent of how the game happens to
be presented.  Every witness is checked with
:func:`check_spe_regular`, so a reported witness always carries a
replayable certificate.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, Hashable

from .core import (DivergenceDetected, Node, StrategySystem, bisim_exact, chosen_path, game_of,
                   minimize, reachable, uassign)
from .equilibrium import SpeCertificate, check_spe_regular, replay_certificate
from .finiteness import is_convergent
from .verdict import Status, Verdict

MEMORYLESS = "memoryless"


@dataclass(frozen=True)
class BoundedMemory:
    """Witnesses with ``m`` memory states; the update depends on (state, memory)."""

    m: int

    def __post_init__(self):
        if not 1 <= self.m <= 3:
            raise ValueError("bounded memory witnesses are limited to 1 <= m <= 3")


@dataclass(frozen=True)
class GoodWitness:
    ref: Hashable
    head: Any
    profile: StrategySystem
    certificate: SpeCertificate


@dataclass(frozen=True)
class EscalationReport:
    profile: str
    lasso: DivergenceDetected
    witnesses: tuple
    verified: bool

    @property
    def period(self):
        return self.lasso.period


@dataclass(frozen=True)
class NoEscalation:
    reason: str


def is_divergent(s, fuel=None) -> Verdict:
    """Does the chosen path avoid leaves forever?"""
    v = is_convergent(s, fuel)
    if v.status is Status.FAILS:
        tr = v.witness
        res = uassign(s, len(tr.steps) + 1)
        return Verdict.holds(f"lasso of period {res.period}", data=res)
    if v.status is Status.HOLDS:
        return Verdict.fails(v.data, "the chosen path reaches a leaf")
    return Verdict.unknown(v.witness, "no lasso found within the fuel")


def _search_game(s):
    """The game witnesses are built on: the bisimulation quotient of the
    subgame at ``s``, so that the search only depends on the game up to
    bisimulation.  Translated families keep their canonical states."""
    game = game_of(s)
    return game if game.translated else minimize(game)


def _memoryless_candidates(s):
    game = _search_game(s)
    head_ref = game.canon(game.root)[0]
    head = s.unfold().chosen
    census = tuple(reachable(game))
    nodes = [r for r in census if not game.unfold(r).is_leaf]
    pools = [(head,) if r == head_ref else game.arena.space(game.unfold(r).agent).labels
             for r in nodes]
    for combo in product(*pools):
        pick = dict(zip(nodes, combo))

        def view(ref, pick=pick):
            v = game.unfold_fn(ref)
            if v.is_leaf:
                return v
            return Node(v.agent, v.branch, pick[game.canon(ref)[0]])

        yield StrategySystem(game.arena, game.root, view, census, game.quotient,
                             name=f"witness({s.name})" if s.name else "witness")


def _memory_candidates(s, m):
    """Profiles over (canonical state, memory) pairs, memory starting at 0."""
    game = _search_game(s)
    if game.translated:
        return
    head = s.unfold().chosen
    nodes = [r for r in reachable(game) if not game.unfold(r).is_leaf]
    leaves = [r for r in reachable(game) if game.unfold(r).is_leaf]
    slots = [(r, k) for r in nodes for k in range(m)]
    pools = []
    for r, k in slots:
        labels = game.arena.space(game.unfold(r).agent).labels
        if r == game.root and k == 0:
            labels = (head,)
        pools.append([(c, u) for c in labels for u in range(m)])
    for combo in product(*pools):
        rule = dict(zip(slots, combo))
        states = {(r, 0): game.unfold(r) for r in leaves}
        for (r, k), (c, u) in rule.items():
            v = game.unfold(r)
            branch = {}
            for label in game.arena.space(v.agent).labels:
                tgt = v.branch[label]
                branch[label] = (tgt, 0) if game.unfold(tgt).is_leaf else (tgt, u)
            states[(r, k)] = Node(v.agent, branch, c)
        yield StrategySystem.from_states(game.arena, (game.root, 0), states, name="witness")


def is_good(s, witness_class=MEMORYLESS) -> Verdict:
    """Is the head choice of ``s`` the head choice of some SPE on the same game?

    On Holds, ``data`` is a :class:`GoodWitness`.  The search is finite, so
    the answer is never Unknown; Fails means no witness exists in the class.
    """
    s.require_census("the good-choice check")
    view = s.unfold()
    if view.is_leaf:
        return Verdict.holds("a leaf is an equilibrium", data=GoodWitness(s.root, None, s, SpeCertificate()))
    if witness_class == MEMORYLESS:
        classes = [_memoryless_candidates(s)]
    else:
        classes = [_memoryless_candidates(s)] + [_memory_candidates(s, m) for m in range(2, witness_class.m + 1)]
    tried = 0
    for candidates in classes:
        for w in candidates:
            tried += 1
            v = check_spe_regular(w)
            if v.status is Status.HOLDS:
                return Verdict.holds(f"witness found after {tried} candidates",
                                     data=GoodWitness(s.root, view.chosen, w, v.data))
    return Verdict.fails(s.root, f"none of {tried} candidate profiles is an SPE with head {view.chosen!r}")


def along_good(s, witness_class=MEMORYLESS) -> Verdict:
    """Is every node state on the chosen path good?  ``data``: the witnesses."""
    s.require_census("the along-good check")
    tr = chosen_path(s, len(s.census) + 1)
    witnesses = []
    seen = set()
    for step in tr.steps:
        key = s.canon(step.ref)[0]
        if key in seen:
            continue
        seen.add(key)
        v = is_good(s.at(step.ref), witness_class)
        if v.status is not Status.HOLDS:
            return Verdict.fails(step.ref, f"choice {step.chosen!r} at {step.ref!r} is not good: {v.reason}")
        witnesses.append(v.data)
    return Verdict.holds(f"{len(witnesses)} path states are good", data=tuple(witnesses))


def verify_witness(s, w: GoodWitness) -> bool:
    """The witness plays the same game from the same node, starts with the
    same choice, and its certificate replays."""
    residual = game_of(s.at(w.ref))
    if not bisim_exact(game_of(w.profile), residual):
        return False
    head = w.profile.unfold()
    if head.is_leaf or head.chosen != s.unfold(w.ref).chosen:
        return False
    return replay_certificate(w.profile, w.certificate)


def check_escalation(s, witness_class=MEMORYLESS):
    """An :class:`EscalationReport` when ``s`` diverges along good choices."""
    s.require_census("the escalation check")
    div = is_divergent(s)
    if div.status is not Status.HOLDS:
        return NoEscalation(f"not divergent: {div.reason}")
    ag = along_good(s, witness_class)
    if ag.status is not Status.HOLDS:
        return NoEscalation(f"not along good: {ag.reason}")
    verified = all(verify_witness(s, w) for w in ag.data)
    return EscalationReport(s.name, div.data, ag.data, verified)
