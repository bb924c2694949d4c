import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

import gen
from cogames import gallery
from cogames.arena import Payoff
from cogames.core import GameSystem, Leaf, Node, PLeaf, PNode, bisim_exact, game_of, unfold_game
from cogames.errors import NoCensus, ParseError
from cogames.multistage import MSGameSystem
from cogames.textio.dsl import parse_any, parse_game, parse_profile, state_names, to_dsl, tokenize

GAMES = Path(__file__).resolve().parent.parent / "games"
seeds = st.integers(0, 2**32 - 1)

MINIMAL = ("arena{agents A; choices A{l,r}; utility A int leq} "
           "def root = node A {l->t, r->t}; def t = leaf{A:1}; root root")

YY = (GAMES / "yingyang.game").read_text()


def _err(text, parse=parse_game):
    with pytest.raises(ParseError) as e:
        parse(text)
    return e.value


def test_minimal_document():
    g = parse_game(MINIMAL)
    assert len(g.census) == 2
    leaf = PLeaf(Payoff.of(A=1), "t")
    assert unfold_game(g, 3) == PNode("A", "root", (("l", leaf), ("r", leaf)))


def test_tokens_carry_positions():
    toks = tokenize("arena {\n  agents A # note\n}")
    assert [(t.text, t.line, t.col) for t in toks if t.kind != "eof"] == [
        ("arena", 1, 1), ("{", 1, 7), ("agents", 2, 3), ("A", 2, 10), ("}", 3, 1)]


def test_yingyang_file_matches_gallery():
    assert bisim_exact(parse_game(YY), gallery.yingyang_game())


def test_yingyang_profile_with_both_right_is_acbc():
    s = parse_profile(YY + "\nchoose a = right\nchoose b = right\n")
    assert bisim_exact(s, gallery.yingyang_profile("AcBc"))
    assert bisim_exact(parse_profile((GAMES / "yingyang-acbc.game").read_text()), s)


def test_keywords_are_contextual():
    text = MINIMAL.replace("def t", "def node").replace("->t", "->node").replace("-> t", "-> node")
    g = parse_game(text)
    assert g.unfold("node").is_leaf


# -- malformed documents ---------------------------------------------------------

def test_lexical_error_is_positioned():
    e = _err(MINIMAL.replace("{A:1}", "{A:1 $}"))
    assert (e.line, e.column) == (1, MINIMAL.index("}; root") + 2)
    assert "unexpected character" in e.message


def test_syntax_error_is_positioned():
    e = _err("arena { agents A\n  choices A {l r} }")
    assert (e.line, e.column) == (2, 16)


def test_missing_branch_names_the_node():
    e = _err(MINIMAL.replace("{l->t, r->t}", "{l->t}"))
    assert "node 'root' has no branch for 'r'" in e.message
    assert e.line == 1


def test_semantic_errors():
    assert "unknown agent" in _err(MINIMAL.replace("node A", "node Z")).message
    assert "'x'" in _err(MINIMAL.replace("r->t}", "x->t}")).message
    assert "undefined" in _err(MINIMAL.replace("l->t", "l->u")).message
    assert "defined twice" in _err(MINIMAL + "; def t = leaf{A:2}").message
    assert "domain" in _err(MINIMAL.replace("leaf{A:1}", "leaf{A:x}")).message


def test_profile_errors():
    assert "no choose line" in _err(YY + "\nchoose a = right\n", parse_profile).message
    e = _err(YY + "\nchoose a = left\nchoose b = right\n", parse_profile)
    assert "'left'" in e.message and e.line > 1
    acbc = (GAMES / "yingyang-acbc.game").read_text()
    assert bisim_exact(parse_game(acbc), gallery.yingyang_game())
    assert "undefined" in _err(YY + "\nchoose zz = right\n", parse_game).message
    assert "leaf" in _err(YY + "\nchoose la = right\n", parse_game).message


def test_parse_any_dispatch():
    assert not parse_any(YY).is_profile
    assert parse_any((GAMES / "yingyang-acbc.game").read_text()).is_profile


# -- round trips -----------------------------------------------------------------

def _census_entries():
    for name, entry in sorted(gallery.GALLERY.items()):
        s = entry.factory()
        if s.census is not None and s.quotient is None:
            yield name, s


@pytest.mark.parametrize("name,system", list(_census_entries()))
def test_gallery_round_trip(name, system):
    text = to_dsl(system)
    back = parse_any(text)
    assert type(back) is type(system) or isinstance(back, type(system))
    assert bisim_exact(back, system)
    assert to_dsl(back) == text


def test_translated_and_programmatic_systems_have_no_text_form():
    for s in (gallery.dollar_game(), gallery.dollar_profile("AcBc"), gallery.game_wfh()):
        with pytest.raises(NoCensus):
            to_dsl(s)


def test_state_names_fall_back_to_bfs_numbering():
    arena = gen.int_arena(n_agents=1)
    h = parse_game(to_dsl(gen.random_census_game(random.Random(3), gen.int_arena())))
    assert set(state_names(h).values()) == set(h.census)
    states = {(0, "x"): Node("A", {"a0": (1, "y"), "a1": (1, "y")}), (1, "y"): Leaf(Payoff.of(A=0))}
    names = state_names(GameSystem.from_states(arena, (0, "x"), states))
    assert names == {(0, "x"): "s0", (1, "y"): "s1"}


def test_multistage_round_trip():
    g = gallery.example_ms()
    back = parse_any(to_dsl(g))
    assert isinstance(back, MSGameSystem) and bisim_exact(back, g)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_random_documents_round_trip(seed):
    s = gen.random_doc_system(random.Random(seed))
    text = to_dsl(s)
    back = parse_any(text)
    assert back.is_profile == s.is_profile
    assert bisim_exact(back, s)
    assert to_dsl(back) == text


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_game_of_parsed_profile_is_parsed_game(seed):
    s = gen.random_census_profile(random.Random(seed))
    assert bisim_exact(game_of(parse_profile(to_dsl(s))), game_of(s))
