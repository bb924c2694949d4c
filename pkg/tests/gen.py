"""Seeded random constructions shared by the property and acceptance tests."""
from __future__ import annotations

from itertools import product

from cogames.arena import (EQUALITY, INDIFFERENCE, INT_LEQ, RELATION, ArenaSpec, Enumerated,
                           Payoff, UtilityDomain)
from cogames.core import GameSystem, Leaf, Node, StrategySystem
from cogames.finiteness import profile_count
from cogames.multistage import MSGameSystem, MSNode, MSStrategySystem

AGENTS = ("A", "B", "C")


def int_arena(n_agents=2, n_choices=2, pref=INT_LEQ, sizes=None):
    sizes = sizes or [n_choices] * n_agents
    return ArenaSpec.build({
        a: (Enumerated(tuple(f"{a.lower()}{i}" for i in range(k))), UtilityDomain.integers(pref))
        for a, k in zip(AGENTS, sizes)
    })


def random_payoff(rng, arena, lo=-9, hi=9):
    return Payoff.of({a: rng.randint(lo, hi) for a in arena.agents})


def random_tree_game(rng, max_depth=4, max_branch=3, lo=-9, hi=9, bound=4096, pref=INT_LEQ):
    """A finite tree game (states named by label paths) with at most ``bound`` profiles."""
    n_agents = rng.choice((2, 3))
    arena = int_arena(sizes=[rng.randint(2, max_branch) for _ in range(n_agents)], pref=pref)
    while True:
        states = {}

        def grow(path, depth):
            if depth == max_depth or rng.random() < 0.15 + 0.2 * depth:
                states[path] = Leaf(random_payoff(rng, arena, lo, hi))
                return
            agent = rng.choice(arena.agents)
            labels = arena.space(agent).labels
            states[path] = Node(agent, {c: path + (c,) for c in labels})
            for c in labels:
                grow(path + (c,), depth + 1)

        grow((), 0)
        g = GameSystem.from_states(arena, (), states, name="random-tree")
        if profile_count(g) <= bound:
            return g


def _graph(rng, n, arena, profile, leaf_share=0.35, lo=-3, hi=3):
    states = {}
    n_leaves = max(1, round(n * leaf_share)) if n > 1 else rng.randint(0, 1)
    leaf_ids = set(rng.sample(range(n), n_leaves))
    for i in range(n):
        if i in leaf_ids:
            states[i] = Leaf(random_payoff(rng, arena, lo, hi))
            continue
        agent = rng.choice(arena.agents)
        labels = arena.space(agent).labels
        branch = {c: rng.randrange(n) for c in labels}
        states[i] = Node(agent, branch, rng.choice(labels) if profile else None)
    return states


def random_census_profile(rng, max_states=12):
    arena = int_arena(n_agents=2, n_choices=2)
    n = rng.randint(1, max_states)
    states = _graph(rng, n, arena, True)
    return StrategySystem.from_states(arena, 0, states, name="random-profile")


def random_census_game(rng, arena, n=None, max_states=12, lo=0, hi=1):
    n = n or rng.randint(1, max_states)
    return GameSystem.from_states(arena, 0, _graph(rng, n, arena, False, lo=lo, hi=hi),
                                  name="random-game")


def _relabel(g, perm):
    states = {}
    for r in g.census:
        v = g.unfold(r)
        states[perm[r]] = v if v.is_leaf else Node(v.agent, {c: perm[t] for c, t in v.branch.items()})
    return GameSystem.from_states(g.arena, perm[g.root], states, name="relabelled")


def _unroll(g):
    """Two copies of every state; each edge hops to the other copy."""
    states = {}
    for r in g.census:
        v = g.unfold(r)
        for k in (0, 1):
            states[(r, k)] = v if v.is_leaf else Node(v.agent, {c: (t, 1 - k) for c, t in v.branch.items()})
    return GameSystem.from_states(g.arena, (g.root, 0), states, name="unrolled")


def _mutate(rng, g, lo=0, hi=1):
    states = {r: g.unfold(r) for r in g.census}
    r = rng.choice(list(states))
    v = states[r]
    if v.is_leaf:
        states[r] = Leaf(random_payoff(rng, g.arena, lo, hi))
    else:
        branch = dict(v.branch)
        branch[rng.choice(list(branch))] = rng.choice(list(states))
        states[r] = Node(v.agent, branch)
    return GameSystem.from_states(g.arena, g.root, states, name="mutated")


def random_game_pair(rng, max_states=12):
    """Pairs over one arena, mixing equal-by-construction and unrelated ones."""
    arena = int_arena(n_agents=rng.choice((1, 2)), n_choices=2)
    g1 = random_census_game(rng, arena, max_states=max_states)
    mode = rng.choice(("independent", "relabel", "unroll", "mutate"))
    if mode == "relabel":
        perm = list(range(len(g1.census)))
        rng.shuffle(perm)
        g2 = _relabel(g1, dict(zip(g1.census, perm)))
    elif mode == "unroll" and len(g1.census) <= max_states // 2:
        g2 = _unroll(g1)
    elif mode == "mutate":
        g2 = _mutate(rng, g1)
    else:
        g2 = random_census_game(rng, arena, max_states=max_states)
    return g1, g2


def random_ms_game(rng, max_agents=3, max_choices=3, lo=-9, hi=9):
    """One simultaneous stage; every joint choice leads to its own leaf."""
    n = rng.randint(1, max_agents)
    arena = int_arena(sizes=[rng.randint(1, max_choices) for _ in range(n)])
    joints = list(product(*(sp.labels for sp in arena.spaces)))
    states = {("out", j): Leaf(random_payoff(rng, arena, lo, hi)) for j in joints}
    states["root"] = MSNode({j: ("out", j) for j in joints})
    return MSGameSystem.from_states(arena, "root", states, name="random-ms")


def _random_domain(rng):
    kind = rng.choice(("int", "sym"))
    if kind == "int":
        return UtilityDomain.integers(rng.choice((INT_LEQ, EQUALITY, INDIFFERENCE)))
    labels = tuple(f"u{i}" for i in range(rng.randint(1, 3)))
    pref = rng.choice((EQUALITY, INDIFFERENCE, RELATION))
    pairs = [(x, y) for x, y in zip(labels, labels[1:])] if pref == RELATION else []
    return UtilityDomain.symbolic(labels, pref, pairs)


def random_doc_system(rng, max_states=8):
    """Random census game, profile or multi-stage game over a random arena."""
    n_agents = rng.randint(1, 3)
    spec = {}
    for a in AGENTS[:n_agents]:
        labels = tuple(f"{a.lower()}{i}" for i in range(rng.randint(1, 3)))
        spec[a] = (Enumerated(labels), _random_domain(rng))
    arena = ArenaSpec.build(spec)

    def pay():
        vals = {}
        for a in arena.agents:
            dom = arena.domain(a)
            vals[a] = rng.choice(dom.values) if dom.symbolic_values else rng.randint(-5, 5)
        return Payoff.of(vals)

    n = rng.randint(1, max_states)
    profile = rng.random() < 0.5
    multi = rng.random() < 0.25
    names = [f"q{i}" for i in range(n)]
    states = {}
    for i, name in enumerate(names):
        if i > 0 and rng.random() < 0.35 or n == 1:
            states[name] = Leaf(pay())
            continue
        if multi:
            joints = list(product(*(sp.labels for sp in arena.spaces)))
            chosen = rng.choice(joints) if profile else None
            states[name] = MSNode({j: rng.choice(names) for j in joints}, chosen)
        else:
            agent = rng.choice(arena.agents)
            labels = arena.space(agent).labels
            states[name] = Node(agent, {c: rng.choice(names) for c in labels},
                                rng.choice(labels) if profile else None)
    if multi:
        cls = MSStrategySystem if profile else MSGameSystem
    else:
        cls = StrategySystem if profile else GameSystem
    return cls.from_states(arena, names[0], states, name="random-doc")
