"""Built-in constructions of the named games, with their analytic facts.

Payoffs that the source material does not print (the leaves of the
two-agent example tree and the dollar-auction constants) are reconstructions.
They live in :data:`EXAMPLE_2_1_LEAVES` and :data:`DOLLAR_PRIZE` only, so
swapping in other values is a one-line change.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .arena import (EQUALITY, INDIFFERENCE, NATURALS, ArenaSpec, Enumerated, Payoff,
                    UtilityDomain, unit_domain)
from .core import GameSystem, Leaf, Node, StrategySystem, with_pref
from .multistage import MSGameSystem, MSNode

# -- two-agent example tree ---------------------------------------------------

EXAMPLE_2_1_ARENA = ArenaSpec.build({
    "A": (("blue", "green", "red"), UtilityDomain.ordered(("weak", "medium", "strong"))),
    "B": (("black", "dotted"), UtilityDomain.integers()),
})

# reconstruction: leaf payoffs are placeholders
EXAMPLE_2_1_LEAVES = {
    "blue": {"A": "strong", "B": 0},
    ("green", "black"): {"A": "weak", "B": 2},
    ("green", "dotted"): {"A": "medium", "B": 1},
    ("red", "black"): {"A": "medium", "B": 3},
    ("red", "dotted"): {"A": "weak", "B": 4},
}


def example_2_1() -> GameSystem:
    """A moves blue/green/red; after green or red, B moves black/dotted."""
    arena = EXAMPLE_2_1_ARENA
    states = {
        "root": Node("A", {"blue": "blue", "green": "green", "red": "red"}),
        "blue": Leaf(arena.payoff(EXAMPLE_2_1_LEAVES["blue"])),
    }
    for a in ("green", "red"):
        states[a] = Node("B", {"black": f"{a}.black", "dotted": f"{a}.dotted"})
        for b in ("black", "dotted"):
            states[f"{a}.{b}"] = Leaf(arena.payoff(EXAMPLE_2_1_LEAVES[(a, b)]))
    return GameSystem.from_states(arena, "root", states, name="example-2-1")


def example_ms() -> MSGameSystem:
    """One simultaneous stage over the same choices and utilities: 3 x 2 outcomes."""
    arena = EXAMPLE_2_1_ARENA
    states = {}
    branch = {}
    for i, a in enumerate(arena.space("A").labels):
        for j, b in enumerate(arena.space("B").labels):
            name = f"{a}.{b}"
            branch[(a, b)] = name
            utility = arena.domain("A").values[(i + j) % 3]
            states[name] = Leaf(arena.payoff(A=utility, B=i * 2 + j))
    states["root"] = MSNode(branch)
    return MSGameSystem.from_states(arena, "root", states, name="example-ms")


# -- finite histories without a longest one -----------------------------------

TT = "tt"

ALICE_BOB = ArenaSpec.build({
    "Alice": (NATURALS, unit_domain(TT)),
    "Bob": (Enumerated((TT,)), unit_domain(TT)),
})

TRIV = Payoff.of(Alice=TT, Bob=TT)


def _thread(n):
    return ("thread", n)


def _alice_bob_view(ref):
    if ref == ("wfh",):
        return Node("Alice", _thread)
    n = ref[1]
    if n == 0:
        return Leaf(TRIV)
    return Node("Bob", {TT: _thread(n - 1)})


def threadlike(n: int) -> GameSystem:
    """A chain of ``n`` Bob nodes ending in the trivial leaf."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    states = {_thread(k): _alice_bob_view(_thread(k)) for k in range(n + 1)}
    return GameSystem.from_states(ALICE_BOB, _thread(n), states, name=f"threadlike-{n}")


def threadlike_profile(n: int) -> StrategySystem:
    states = {}
    for k in range(n + 1):
        v = _alice_bob_view(_thread(k))
        states[_thread(k)] = v if v.is_leaf else Node(v.agent, v.branch, TT)
    return StrategySystem.from_states(ALICE_BOB, _thread(n), states, name=f"threadlike-{n}-profile")


WFH_FACTS = {
    "finite_history": "branch n is threadlike(n), whose only history has n moves (induction on n)",
    "no_longest_history": "branch n yields a history of n + 1 moves, for every n",
}


def game_wfh() -> GameSystem:
    """Alice picks any natural n, then Bob moves n times."""
    return GameSystem.programmatic(ALICE_BOB, ("wfh",), _alice_bob_view, name="game-wfh",
                                   facts=WFH_FACTS)


def wfh_history(g: GameSystem, n: int, cache: dict | None = None) -> tuple:
    """The history of ``g`` that starts with Alice's choice ``n``, replayed.

    Each Bob step is read from ``g.unfold``.  ``cache`` maps a state to the
    length of its remaining single-branch history so that probing every
    ``n`` up to a bound costs linear, not quadratic, time.
    """
    if cache is None:
        cache = {}
    root = g.unfold()
    ref = root.target(n)
    walked = []
    while ref not in cache:
        view = g.unfold(ref)
        if view.is_leaf:
            cache[ref] = 0
            break
        labels = g.arena.space(view.agent).labels
        if len(labels) != 1:
            raise ValueError(f"state {ref!r} is not single-branch")
        walked.append(ref)
        ref = view.target(labels[0])
    length = cache[ref]
    for r in reversed(walked):
        length += 1
        cache[r] = length
    return (n,) + (TT,) * cache[root.target(n)]


def no_longest_history(limit: int, g: GameSystem | None = None) -> dict:
    """For each n <= limit, a replayed history of more than n moves."""
    g = g or game_wfh()
    cache = {}
    out = {}
    for n in range(limit + 1):
        h = wfh_history(g, n, cache)
        out[n] = len(h)
    return out


# -- dollar auction -----------------------------------------------------------

# reconstruction: stopping at stage n pays the stopper -n, the opponent DOLLAR_PRIZE - n
DOLLAR_PRIZE = 100

DOLLAR_ARENA = ArenaSpec.build({
    "A": (("stop", "continue"), UtilityDomain.integers()),
    "B": (("stop", "continue"), UtilityDomain.integers()),
})

DOLLAR_KINDS = ("AcBc", "AsBc", "AcBs", "AsBs")

_DOLLAR_CENSUS = (("node", 0), ("node", 1), ("stop", 0), ("stop", 1))


def _dollar_owner(n):
    return "A" if n % 2 == 0 else "B"


def _dollar_quotient(ref):
    tag, n = ref
    base = n % 2
    return (tag, base), base - n


def _dollar_view(ref, kind=None):
    tag, n = ref
    if tag == "stop":
        stopper = _dollar_owner(n)
        other = "B" if stopper == "A" else "A"
        return Leaf(Payoff.of({stopper: -n, other: DOLLAR_PRIZE - n}))
    agent = _dollar_owner(n)
    chosen = None
    if kind is not None:
        move = kind[1] if agent == "A" else kind[3]
        chosen = "continue" if move == "c" else "stop"
    return Node(agent, {"stop": ("stop", n), "continue": ("node", n + 1)}, chosen)


def dollar_game(stage: int = 0) -> GameSystem:
    """The dollar auction from ``stage`` on; even stages belong to A."""
    return GameSystem(DOLLAR_ARENA, ("node", stage), _dollar_view, _DOLLAR_CENSUS,
                      _dollar_quotient, name=f"dollar-{stage}")


def dollar_profile(kind: str, stage: int = 0) -> StrategySystem:
    """Stationary profile: ``kind`` is AcBc, AsBc, AcBs or AsBs (c = continue, s = stop)."""
    if kind not in DOLLAR_KINDS:
        raise ValueError(f"dollar profile kind must be one of {DOLLAR_KINDS}")
    return StrategySystem(DOLLAR_ARENA, ("node", stage), lambda r: _dollar_view(r, kind),
                          _DOLLAR_CENSUS, _dollar_quotient, name=f"dollar-{kind.lower()}-{stage}")


# -- ying-yang ------------------------------------------------------------------

YY_KINDS = DOLLAR_KINDS


def yingyang_arena(pref=INDIFFERENCE) -> ArenaSpec:
    dom = UtilityDomain.symbolic(("ying", "yang"), pref)
    return ArenaSpec.build({"A": (("down", "right"), dom), "B": (("down", "right"), dom)})


def _yy_states(arena, kind=None, copies=1):
    def pick(agent):
        if kind is None:
            return None
        move = kind[1] if agent == "A" else kind[3]
        return "right" if move == "c" else "down"

    states = {
        "leafA": Leaf(arena.payoff(A="ying", B="yang")),
        "leafB": Leaf(arena.payoff(A="yang", B="ying")),
    }
    names = [f"{a}{i}" if copies > 1 else a for i in range(copies) for a in "AB"]
    for i, name in enumerate(names):
        agent = "AB"[i % 2]
        nxt = names[(i + 1) % len(names)]
        states[name] = Node(agent, {"down": f"leaf{agent}", "right": nxt}, pick(agent))
    return names[0], states


def yingyang_game(pref=INDIFFERENCE, copies=1) -> GameSystem:
    """A and B alternate; ``down`` ends the game, ``right`` passes the move.

    ``copies`` > 1 unrolls the two-node loop into a longer, bisimilar loop.
    """
    arena = yingyang_arena(pref)
    root, states = _yy_states(arena, copies=copies)
    return GameSystem.from_states(arena, root, states, name="yingyang")


def yingyang_profile(kind: str, pref=INDIFFERENCE, copies=1) -> StrategySystem:
    if kind not in YY_KINDS:
        raise ValueError(f"ying-yang profile kind must be one of {YY_KINDS}")
    arena = yingyang_arena(pref)
    root, states = _yy_states(arena, kind, copies)
    return StrategySystem.from_states(arena, root, states, name=f"yingyang-{kind.lower()}")


# -- registry -----------------------------------------------------------------

@dataclass(frozen=True)
class GalleryEntry:
    """A named construction and the verdicts it is known to have.

    ``facts`` maps a check name to its expected status ("holds"/"fails")
    and a note saying where the fact comes from.
    """

    name: str
    factory: Callable
    description: str
    facts: dict = field(default_factory=dict)


def _entries():
    yield GalleryEntry("example-2-1", example_2_1, "two-agent example tree with agent-dependent choices", {
        "finite": ("holds", "finite tree by construction"),
        "finite-history": ("holds", "finite tree by construction"),
    })
    yield GalleryEntry("example-ms", example_ms, "one simultaneous stage over the same arena")
    yield GalleryEntry("game-wfh", game_wfh, "only finite histories, no longest history", {
        "finite": ("fails", "Alice's choice space is the naturals"),
        "broad": ("fails", "infinitely many Alice choices give infinitely many profiles"),
        "finite-history": ("holds", WFH_FACTS["finite_history"]),
    })
    for n in (0, 1, 2, 3):
        yield GalleryEntry(f"threadlike-{n}", lambda n=n: threadlike(n), f"chain of {n} Bob moves", {
            "finite": ("holds", "chain ends in a leaf"),
            "finite-history": ("holds", "chain ends in a leaf"),
        })
    yield GalleryEntry("dollar", dollar_game, "dollar auction game from stage 0", {
        "finite": ("fails", "A and B may continue forever"),
        "finite-history": ("fails", "the all-continue history is infinite"),
    })
    for kind in DOLLAR_KINDS:
        facts = {"convergent": ("fails" if kind == "AcBc" else "holds", "stationary choices")}
        if kind == "AcBc":
            facts["escalation"] = ("holds", "both continue forever along good choices")
        yield GalleryEntry(f"dollar-{kind.lower()}", lambda k=kind: dollar_profile(k),
                           f"dollar auction, stationary profile {kind}", facts)
    yield GalleryEntry("yingyang", yingyang_game, "ying-yang loop, indifferent agents", {
        "finite": ("fails", "right/right loop"),
        "finite-history": ("fails", "right/right loop"),
    })
    yield GalleryEntry("yingyang-unrolled", lambda: yingyang_game(copies=2),
                       "ying-yang loop unrolled to four node states")
    for kind in YY_KINDS:
        facts = {"convergent": ("fails" if kind == "AcBc" else "holds", "stationary choices")}
        if kind == "AcBc":
            facts["escalation"] = ("holds", "both go right forever along good choices")
        yield GalleryEntry(f"yingyang-{kind.lower()}", lambda k=kind: yingyang_profile(k),
                           f"ying-yang, stationary profile {kind}", facts)


GALLERY = {e.name: e for e in _entries()}

_THREADLIKE = re.compile(r"threadlike-(\d+)$")


def lookup(name: str) -> GalleryEntry:
    if name in GALLERY:
        return GALLERY[name]
    m = _THREADLIKE.match(name)
    if m:
        n = int(m.group(1))
        return GalleryEntry(name, lambda: threadlike(n), f"chain of {n} Bob moves")
    raise KeyError(f"no gallery entry named {name!r}")


def build(name: str, pref: str | None = None):
    """Instantiate a gallery entry, optionally overriding every agent's preorder."""
    system = lookup(name).factory()
    if pref is not None:
        system = with_pref(system, pref)
    return system


__all__ = [
    "EQUALITY", "INDIFFERENCE", "example_2_1", "example_ms", "threadlike", "threadlike_profile",
    "game_wfh", "wfh_history", "no_longest_history", "dollar_game", "dollar_profile",
    "yingyang_game", "yingyang_profile", "GALLERY", "GalleryEntry", "lookup", "build",
]
