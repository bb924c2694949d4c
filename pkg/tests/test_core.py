import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from cogames import gallery
from cogames.arena import (EQUALITY, INDIFFERENCE, INTEGERS, ArenaSpec, Enumerated, Payoff,
                           UtilityDomain)
from cogames.core import (Assigned, Continuation, DifferAt, DivergenceDetected, EqualUpTo,
                          FuelExhausted, GameSystem, Leaf, Node, PLeaf, PNode, StrategySystem,
                          bisim_bounded, bisim_exact, chosen_path, game_of, leaf_game,
                          leaf_profile, minimize, reachable, restrict, uassign, unfold_game,
                          with_pref)
from cogames.errors import ArenaMismatch, ConstructionError, NoCensus, UnboundedBranch
from cogames.verdict import Verdict

ARENA = gen.int_arena()
P = Payoff.of(A=1, B=2)

seeds = st.integers(0, 2**32 - 1)


# -- construction ---------------------------------------------------------------

def test_partial_branch_rejected():
    with pytest.raises(ConstructionError, match="must branch on exactly"):
        GameSystem.from_states(ARENA, 0, {0: Node("A", {"a0": 1}), 1: Leaf(P)})


def test_payoff_outside_domain_rejected():
    with pytest.raises(ConstructionError, match="outside the domain"):
        GameSystem.from_states(ARENA, 0, {0: Leaf(Payoff.of(A="x", B=0))})


def test_payoff_must_cover_all_agents():
    with pytest.raises(ConstructionError, match="cover exactly"):
        GameSystem.from_states(ARENA, 0, {0: Leaf(Payoff.of(A=1))})


def test_successor_outside_census_rejected():
    with pytest.raises(ConstructionError, match="outside the census"):
        GameSystem.from_states(ARENA, 0, {0: Node("A", {"a0": 0, "a1": 7})})


def test_profile_node_needs_choice_and_game_node_must_not_have_one():
    with pytest.raises(ConstructionError, match="no chosen"):
        StrategySystem.from_states(ARENA, 0, {0: Node("A", {"a0": 0, "a1": 0})})
    with pytest.raises(ConstructionError, match="carries a chosen"):
        GameSystem.from_states(ARENA, 0, {0: Node("A", {"a0": 0, "a1": 0}, "a0")})
    with pytest.raises(ConstructionError, match="outside the space"):
        StrategySystem.from_states(ARENA, 0, {0: Node("A", {"a0": 0, "a1": 0}, "b0")})


def test_quotient_requires_translation_invariant_prefs():
    sym = ArenaSpec.build({"A": (("x",), UtilityDomain.symbolic(("u",), EQUALITY))})
    with pytest.raises(ConstructionError, match="translation"):
        GameSystem(sym, 0, lambda r: Leaf(Payoff.of(A="u")), (0,), lambda r: (0, 0))


def test_programmatic_views_are_checked_lazily():
    bad = GameSystem.programmatic(ARENA, 0, lambda r: Node("A", {"a0": 1}) if r == 0 else Leaf(P))
    with pytest.raises(ConstructionError):
        bad.unfold()


def test_verdict_is_not_a_boolean():
    with pytest.raises(TypeError):
        bool(Verdict.holds())


# -- unfold_game ------------------------------------------------------------------

def test_unfold_leaf_at_depth_zero():
    assert unfold_game(leaf_game(ARENA, P), 0) == PLeaf(P, "leaf")


def test_unfold_yingyang_two_moves():
    t = unfold_game(gallery.yingyang_game(), 2)
    assert isinstance(t, PNode) and t.agent == "A"
    (d1, down), (r1, right) = t.children
    assert (d1, r1) == ("down", "right")
    assert down.payoff == Payoff.of(A="ying", B="yang")
    assert right.agent == "B"
    (_, down2), (_, cont) = right.children
    assert down2.payoff == Payoff.of(A="yang", B="ying")
    assert cont == Continuation("A")


def test_unfold_wfh_fan_with_sampled_naturals():
    t = unfold_game(gallery.game_wfh(), 1)
    assert t.agent == "Alice" and t.elided
    assert [c for c, _ in t.children] == list(range(8))
    assert t.children[0][1] == PLeaf(gallery.TRIV, ("thread", 0))
    assert t.children[1][1] == Continuation(("thread", 1))


def test_unfold_wfh_two_moves():
    t = unfold_game(gallery.game_wfh(), 2, nat_samples=3)
    one, two = t.children[1][1], t.children[2][1]
    assert one.agent == "Bob" and one.children[0][1] == PLeaf(gallery.TRIV, ("thread", 0))
    assert two.agent == "Bob" and two.children[0][1] == Continuation(("thread", 1))


def test_unfold_declined_sampling_raises():
    with pytest.raises(UnboundedBranch):
        unfold_game(gallery.game_wfh(), 1, nat_samples=None)


def test_unfold_rejects_negative_depth():
    with pytest.raises(ValueError):
        unfold_game(gallery.yingyang_game(), -1)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 6))
def test_unfold_restriction_is_consistent(seed, d):
    g = gen.random_census_game(random.Random(seed), ARENA)
    assert restrict(unfold_game(g, d + 1), d) == unfold_game(g, d)


# -- game_of --------------------------------------------------------------------------

def test_game_of_leaf_profile_is_leaf_game():
    assert bisim_exact(game_of(leaf_profile(ARENA, P)), leaf_game(ARENA, P))


def test_game_of_yingyang_acbc():
    assert bisim_exact(game_of(gallery.yingyang_profile("AcBc")), gallery.yingyang_game())


def test_game_of_dollar_matches_game_to_depth_50():
    r = bisim_bounded(game_of(gallery.dollar_profile("AcBc", 0)), gallery.dollar_game(0), 50)
    assert r == EqualUpTo(50)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_game_of_idempotent_and_keeps_census(seed):
    s = gen.random_census_profile(random.Random(seed))
    g = game_of(s)
    assert game_of(g) is g
    assert len(g.census) == len(s.census)
    assert not g.is_profile


# -- bisimulation -------------------------------------------------------------------------

def test_bisim_bounded_reflexive():
    g = gallery.yingyang_game()
    for k in (0, 1, 5, 20):
        assert bisim_bounded(g, g, k) == EqualUpTo(k)


def test_bisim_bounded_threadlike_2_vs_3():
    r = bisim_bounded(gallery.threadlike(2), gallery.threadlike(3), 10)
    assert isinstance(r, DifferAt)
    assert r.path == ("tt", "tt")
    assert r.reason == "leaf against node"


def test_bisim_bounded_dollar_stages():
    r = bisim_bounded(gallery.dollar_game(0), gallery.dollar_game(2), 1)
    assert r.path == ("stop",)
    assert bisim_bounded(gallery.dollar_game(0), gallery.dollar_game(2), 0) == EqualUpTo(0)


def test_bisim_bounded_picks_lexicographically_least_path():
    arena = ArenaSpec.build({"A": (("l", "r"), UtilityDomain.integers())})
    leaf = {"x": Leaf(Payoff.of(A=0)), "y": Leaf(Payoff.of(A=1))}
    g1 = GameSystem.from_states(arena, "n", {"n": Node("A", {"l": "x", "r": "x"}), **leaf})
    g2 = GameSystem.from_states(arena, "n", {"n": Node("A", {"l": "y", "r": "y"}), **leaf})
    assert bisim_bounded(g1, g2, 3).path == ("l",)


def test_bisim_arena_mismatch():
    with pytest.raises(ArenaMismatch):
        bisim_bounded(gallery.yingyang_game(), gallery.dollar_game(), 3)
    with pytest.raises(ArenaMismatch):
        bisim_exact(gallery.yingyang_game(), gallery.yingyang_game(EQUALITY))


def test_bisim_on_naturals_with_declined_sampling():
    g = gallery.game_wfh()
    with pytest.raises(UnboundedBranch):
        bisim_bounded(g, g, 2, nat_samples=None)
    assert bisim_bounded(g, g, 4) == EqualUpTo(4)


def test_bisim_exact_loop_against_unrolled_loop():
    assert bisim_exact(gallery.yingyang_game(), gallery.yingyang_game(copies=2))


def test_bisim_exact_swapped_leaves_differ():
    g = gallery.yingyang_game()
    arena = g.arena
    states = {r: g.unfold(r) for r in g.census}
    states["leafA"], states["leafB"] = states["leafB"], states["leafA"]
    swapped = GameSystem.from_states(arena, g.root, states)
    assert not bisim_exact(g, swapped)


def test_bisim_exact_translated_family():
    assert bisim_exact(gallery.dollar_game(0), gallery.dollar_game(0))
    assert not bisim_exact(gallery.dollar_game(0), gallery.dollar_game(2))
    assert not bisim_exact(gallery.dollar_game(0), gallery.dollar_game(1))


def test_bisim_exact_profiles_and_games_do_not_mix():
    with pytest.raises(TypeError):
        bisim_exact(gallery.yingyang_game(), gallery.yingyang_profile("AcBc"))
    with pytest.raises(NoCensus):
        bisim_exact(gallery.game_wfh(), gallery.game_wfh())


def test_bisim_exact_profile_choices_matter():
    assert not bisim_exact(gallery.yingyang_profile("AcBc"), gallery.yingyang_profile("AsBc"))
    assert bisim_exact(gallery.yingyang_profile("AcBs"), gallery.yingyang_profile("AcBs", copies=2))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_bisim_exact_agrees_with_bounded_at_product_depth(seed):
    g1, g2 = gen.random_game_pair(random.Random(seed))
    depth = len(g1.census) * len(g2.census)
    assert bisim_exact(g1, g2) == isinstance(bisim_bounded(g1, g2, depth), EqualUpTo)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_bisim_exact_is_an_equivalence(seed):
    rng = random.Random(seed)
    arena = gen.int_arena(n_agents=1)
    gs = [gen.random_census_game(rng, arena, max_states=4) for _ in range(5)]
    eq = {(i, j): bisim_exact(a, b) for i, a in enumerate(gs) for j, b in enumerate(gs)}
    for i in range(5):
        assert eq[i, i]
        for j in range(5):
            assert eq[i, j] == eq[j, i]
            for k in range(5):
                if eq[i, j] and eq[j, k]:
                    assert eq[i, k]


# -- utility assignment ----------------------------------------------------------------

def test_uassign_leaf():
    assert uassign(leaf_profile(ARENA, P), 1) == Assigned(P)


def test_uassign_yingyang_acbc_diverges_with_period_2():
    r = uassign(gallery.yingyang_profile("AcBc"), 100)
    assert isinstance(r, DivergenceDetected)
    assert r.period == 2 and r.stem == () and r.repeated == "A"


def test_uassign_dollar_alice_stops():
    assert uassign(gallery.dollar_profile("AsBc"), 10) == Assigned(Payoff.of(A=0, B=100))


def test_uassign_fuel_exhaustion_on_programmatic_profile():
    arena = gen.int_arena(n_agents=1)
    s = StrategySystem.programmatic(arena, 0, lambda n: Node("A", {"a0": n + 1, "a1": n + 1}, "a0"))
    r = uassign(s, 5)
    assert isinstance(r, FuelExhausted) and len(r.path) == 5


def test_chosen_path_examples():
    tr = chosen_path(leaf_profile(ARENA, P), 1)
    assert tr.steps == () and tr.end == "leaf"
    tr = chosen_path(gallery.yingyang_profile("AcBc"), 10)
    assert [(s.ref, s.chosen) for s in tr.steps] == [("A", "right"), ("B", "right")]
    assert tr.end == "lasso" and tr.loop_start == 0
    tr = chosen_path(gallery.threadlike_profile(2), 10)
    assert [s.agent for s in tr.steps] == ["Bob", "Bob"] and tr.end == "leaf"


def test_chosen_path_rejects_nonpositive_fuel():
    with pytest.raises(ValueError):
        chosen_path(leaf_profile(ARENA, P), 0)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 30))
def test_uassign_is_a_function(seed, fuel):
    s = gen.random_census_profile(random.Random(seed))
    assert uassign(s, fuel) == uassign(s, fuel)
    assert repr(uassign(s, fuel)) == repr(uassign(gen.random_census_profile(random.Random(seed)), fuel))


# -- misc ------------------------------------------------------------------------------

def test_reachable_is_breadth_first():
    assert reachable(gallery.yingyang_game()) == ["A", "leafA", "B", "leafB"]


def test_with_pref_rebuilds_arena():
    g = with_pref(gallery.yingyang_game(), EQUALITY)
    assert g.arena.domain("A").pref_kind == EQUALITY
    assert gallery.yingyang_game().arena.domain("A").pref_kind == INDIFFERENCE


def test_with_pref_keeps_translation_invariance_requirement():
    with pytest.raises(ConstructionError):
        with_pref(gallery.dollar_game(), "order")


def test_arena_helpers():
    assert ARENA.agents == ("A", "B")
    assert isinstance(ARENA.space("A"), Enumerated)
    assert ARENA.domain("B").values == INTEGERS
    joints, elided = ARENA.joint_choices()
    assert len(joints) == 4 and not elided


def test_minimize_collapses_unrolled_loop():
    m = minimize(gallery.yingyang_game(copies=2))
    assert len(m.census) == 4
    assert bisim_exact(m, gallery.yingyang_game())


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_minimize_is_bisimilar_and_minimal(seed):
    g1, g2 = gen.random_game_pair(random.Random(seed))
    m = minimize(g1)
    assert bisim_exact(m, g1)
    assert len(m.census) <= len(reachable(g1))
    assert bisim_exact(g1, g2) == (len(minimize(g1).census) == len(minimize(g2).census)
                                   and bisim_exact(minimize(g1), minimize(g2)))


def test_minimize_rejects_translated_families():
    with pytest.raises(NoCensus):
        minimize(gallery.dollar_game())
