"""A small text format for finite-state games and profiles.

A document declares an arena, names states as leaves, nodes or
multi-stage nodes, designates a root, and optionally fixes a choice per
node.  Names may refer to each other cyclically, which is how regular
infinite games are written::

    arena {
      agents A, B;
      choices A {down, right};
      choices B {down, right};
      utility A {ying, yang} indiff;
      utility B {ying, yang} indiff;
    }
    def a = node A {down -> la, right -> b};
    def b = node B {down -> lb, right -> a};
    def la = leaf {A: ying, B: yang};
    def lb = leaf {A: yang, B: ying};
    root a;
    choose a = right;
    choose b = right;

Utility domains are ``int leq|eq|indiff`` or ``{labels} eq|indiff`` or
``{labels} order {x <= y, ...}``.  ``choices X nat`` declares a
naturals-indexed agent, which may appear in the arena but own no node.
Bare ``profile`` and ``multistage`` lines fix the kind of system even
when the document has no nodes to show it.  Semicolons are optional.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from ..arena import (EQUALITY, INDIFFERENCE, INT_LEQ, INTEGERS, RELATION, ArenaSpec,
                     Enumerated, NATURALS, Payoff, UtilityDomain)
from ..core import GameSystem, Leaf, Node, StrategySystem, reachable
from ..errors import ConstructionError, NoCensus, ParseError
from ..multistage import MSGameSystem, MSNode, MSStrategySystem

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<le><=)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}(),;:=])
""", re.VERBOSE)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Tok(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - start + 1))
    return toks


@dataclass
class GameDoc:
    """The parsed, not yet validated, contents of a document."""

    agents: list = field(default_factory=list)            # [Tok]
    choices: dict = field(default_factory=dict)           # agent -> (Tok, [Tok])
    utilities: dict = field(default_factory=dict)         # agent -> (Tok, values, pref, pairs)
    defs: dict = field(default_factory=dict)              # name -> (Tok, kind, body)
    root: Tok | None = None
    chosen: dict = field(default_factory=dict)            # name -> (Tok, label Tok | [Tok])
    arena_tok: Tok | None = None
    profile: bool = False
    multistage: Tok | None = None


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        self.doc = GameDoc()

    @property
    def tok(self):
        return self.toks[self.i]

    def err(self, tok, msg):
        return ParseError(tok.line, tok.col, msg)

    def take(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, text=None, kind=None):
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "eof" else "end of input"
            raise self.err(t, f"expected {want}, found {got}")
        return self.take()

    def ident(self):
        return self.expect(kind="ident")

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("punct", "arrow", "le"):
            return self.take()
        return None

    def semi(self):
        self.accept(";")

    def listing(self, item, close="}"):
        out = [item()]
        while self.accept(","):
            out.append(item())
        self.expect(close)
        return out

    def parse(self) -> GameDoc:
        while self.tok.kind != "eof":
            t = self.ident()
            if t.text == "arena":
                self.arena(t)
            elif t.text == "def":
                self.definition()
            elif t.text == "root":
                if self.doc.root is not None:
                    raise self.err(t, "root declared twice")
                self.doc.root = self.ident()
            elif t.text == "choose":
                self.choose()
            elif t.text == "profile":
                self.doc.profile = True
            elif t.text == "multistage":
                self.doc.multistage = t
            else:
                raise self.err(t, "expected 'arena', 'def', 'root', 'choose', 'profile' or "
                                  f"'multistage', found {t.text!r}")
            self.semi()
        return self.doc

    def arena(self, t):
        if self.doc.arena_tok is not None:
            raise self.err(t, "arena declared twice")
        self.doc.arena_tok = t
        self.expect("{")
        while not self.accept("}"):
            kw = self.ident()
            if kw.text == "agents":
                self.doc.agents.append(self.ident())
                while self.accept(","):
                    self.doc.agents.append(self.ident())
            elif kw.text == "choices":
                agent = self.ident()
                if self.tok.text == "nat":
                    self.doc.choices[agent.text] = (agent, self.take())
                else:
                    self.expect("{")
                    self.doc.choices[agent.text] = (agent, self.listing(self.ident))
            elif kw.text == "utility":
                agent = self.ident()
                self.doc.utilities[agent.text] = (agent,) + self.domain()
            else:
                raise self.err(kw, f"expected 'agents', 'choices' or 'utility', found {kw.text!r}")
            self.semi()

    def domain(self):
        if self.accept("{"):
            values = self.listing(self.ident)
            kind = self.ident()
            if kind.text == "order":
                self.expect("{")
                pairs = [] if self.accept("}") else self.listing(self.pair)
                return values, kind, pairs
            return values, kind, []
        kind = self.ident()
        if kind.text != "int":
            raise self.err(kind, f"expected 'int' or '{{', found {kind.text!r}")
        return INTEGERS, self.ident(), []

    def pair(self):
        x = self.ident()
        self.expect("<=")
        return x, self.ident()

    def value(self):
        t = self.tok
        if t.kind in ("int", "ident"):
            return self.take()
        raise self.err(t, f"expected a utility value, found {t.text!r}")

    def definition(self):
        name = self.ident()
        self.expect("=")
        kind = self.ident()
        if kind.text == "leaf":
            self.expect("{")
            body = self.listing(self.entry)
        elif kind.text == "node":
            agent = self.ident()
            self.expect("{")
            body = (agent, self.listing(self.arrow))
        elif kind.text == "msnode":
            self.expect("{")
            body = self.listing(self.joint_arrow)
        else:
            raise self.err(kind, f"expected 'leaf', 'node' or 'msnode', found {kind.text!r}")
        if name.text in self.doc.defs:
            raise self.err(name, f"state {name.text!r} is defined twice")
        self.doc.defs[name.text] = (name, kind.text, body)

    def entry(self):
        agent = self.ident()
        self.expect(":")
        return agent, self.value()

    def arrow(self):
        label = self.ident()
        self.expect("->")
        return label, self.ident()

    def joint(self):
        self.expect("(")
        return self.listing(self.ident, ")")

    def joint_arrow(self):
        first = self.tok
        labels = self.joint()
        self.expect("->")
        return first, labels, self.ident()

    def choose(self):
        name = self.ident()
        self.expect("=")
        label = self.joint() if self.tok.text == "(" else self.ident()
        if name.text in self.doc.chosen:
            raise self.err(name, f"state {name.text!r} has two choose lines")
        self.doc.chosen[name.text] = (name, label)


def parse_document(text: str) -> GameDoc:
    return _Parser(text).parse()


_PREFS = {"leq": INT_LEQ, "eq": EQUALITY, "indiff": INDIFFERENCE, "order": RELATION}


class _Builder:
    def __init__(self, doc: GameDoc):
        self.doc = doc

    def err(self, tok, msg):
        return ParseError(tok.line, tok.col, msg)

    def arena(self) -> ArenaSpec:
        doc = self.doc
        if doc.arena_tok is None:
            raise ParseError(1, 1, "missing arena block")
        if not doc.agents:
            raise self.err(doc.arena_tok, "the arena declares no agents")
        names = [t.text for t in doc.agents]
        for t in doc.agents:
            if names.count(t.text) > 1:
                raise self.err(t, f"agent {t.text!r} declared twice")
        for table, what in ((doc.choices, "choices"), (doc.utilities, "utility")):
            for agent, entry in table.items():
                if agent not in names:
                    raise self.err(entry[0], f"unknown agent {agent!r}")
            for t in doc.agents:
                if t.text not in table:
                    raise self.err(t, f"agent {t.text!r} has no {what} declaration")
        spec = {}
        for t in doc.agents:
            _, labels = doc.choices[t.text]
            if isinstance(labels, Tok):
                spec[t.text] = (NATURALS, self.domain(t.text))
                continue
            seen = set()
            for lab in labels:
                if lab.text in seen:
                    raise self.err(lab, f"choice {lab.text!r} listed twice for {t.text!r}")
                seen.add(lab.text)
            spec[t.text] = (Enumerated(tuple(lab.text for lab in labels)), self.domain(t.text))
        return ArenaSpec.build(spec)

    def domain(self, agent) -> UtilityDomain:
        tok, values, kind, pairs = self.doc.utilities[agent]
        pref = _PREFS.get(kind.text)
        if pref is None:
            raise self.err(kind, f"unknown preorder {kind.text!r}")
        try:
            if values == INTEGERS:
                return UtilityDomain.integers(pref)
            return UtilityDomain.symbolic([v.text for v in values], pref,
                                          [(x.text, y.text) for x, y in pairs])
        except ConstructionError as e:
            raise self.err(kind, f"utility of {agent!r}: {e}") from None

    def target(self, tok):
        if tok.text not in self.doc.defs:
            raise self.err(tok, f"undefined state {tok.text!r}")
        return tok.text

    def label(self, arena, agent, tok):
        if not isinstance(arena.space(agent), Enumerated):
            raise self.err(tok, f"agent {agent!r} chooses among the naturals; such nodes cannot be written")
        if tok.text not in arena.space(agent):
            raise self.err(tok, f"choice {tok.text!r} is not in the space of {agent!r}")
        return tok.text

    def joint_label(self, arena, toks, where):
        if len(toks) != len(arena.agents):
            raise self.err(where, f"a joint choice needs {len(arena.agents)} labels")
        return tuple(self.label(arena, a, t) for a, t in zip(arena.agents, toks))

    def views(self, arena, profile):
        doc = self.doc
        views = {}
        kinds = {kind for _, kind, _ in doc.defs.values()}
        if "node" in kinds and "msnode" in kinds:
            bad = next(n for n, k, _ in doc.defs.values() if k == "msnode")
            raise self.err(bad, "a document mixes node and msnode definitions")
        for name, (ntok, kind, body) in doc.defs.items():
            if kind == "leaf":
                views[name] = Leaf(self.payoff(arena, ntok, body))
                continue
            chosen = None
            if profile:
                if name not in doc.chosen:
                    raise self.err(ntok, f"node {name!r} has no choose line")
            if kind == "node":
                agent_tok, arrows = body
                if agent_tok.text not in arena.agents:
                    raise self.err(agent_tok, f"unknown agent {agent_tok.text!r}")
                agent = agent_tok.text
                branch = {}
                for lab, tgt in arrows:
                    c = self.label(arena, agent, lab)
                    if c in branch:
                        raise self.err(lab, f"node {name!r} lists choice {c!r} twice")
                    branch[c] = self.target(tgt)
                missing = [c for c in arena.space(agent).labels if c not in branch]
                if missing:
                    raise self.err(ntok, f"node {name!r} has no branch for {', '.join(map(repr, missing))}")
                if profile:
                    ctok, lab = doc.chosen[name]
                    if isinstance(lab, list):
                        raise self.err(ctok, f"node {name!r} takes a single label, not a joint choice")
                    chosen = self.label(arena, agent, lab)
                views[name] = Node(agent, branch, chosen)
            else:
                branch = {}
                for first, labels, tgt in body:
                    j = self.joint_label(arena, labels, first)
                    if j in branch:
                        raise self.err(first, f"node {name!r} lists joint choice {j!r} twice")
                    branch[j] = self.target(tgt)
                missing = [j for j in product(*(sp.labels for sp in arena.spaces)) if j not in branch]
                if missing:
                    raise self.err(ntok, f"multi-stage node {name!r} has no branch for {missing[0]!r}")
                if profile:
                    ctok, lab = doc.chosen[name]
                    if not isinstance(lab, list):
                        raise self.err(ctok, f"multi-stage node {name!r} needs a joint choice")
                    chosen = self.joint_label(arena, lab, ctok)
                views[name] = MSNode(branch, chosen)
        for name, (ctok, _) in doc.chosen.items():
            if name not in doc.defs:
                raise self.err(ctok, f"choose names undefined state {name!r}")
            if doc.defs[name][1] == "leaf":
                raise self.err(ctok, f"choose names leaf {name!r}")
        return views

    def payoff(self, arena, ntok, entries) -> Payoff:
        vals = {}
        for agent_tok, vtok in entries:
            a = agent_tok.text
            if a not in arena.agents:
                raise self.err(agent_tok, f"unknown agent {a!r}")
            if a in vals:
                raise self.err(agent_tok, f"agent {a!r} paid twice")
            v = int(vtok.text) if vtok.kind == "int" else vtok.text
            if v not in arena.domain(a):
                raise self.err(vtok, f"utility {vtok.text!r} is outside the domain of {a!r}")
            vals[a] = v
        missing = [a for a in arena.agents if a not in vals]
        if missing:
            raise self.err(ntok, f"leaf {ntok.text!r} pays no utility to {', '.join(missing)}")
        return Payoff.of(vals)

    def build(self, profile):
        arena = self.arena()
        views = self.views(arena, profile)
        if self.doc.root is None:
            raise ParseError(self.doc.arena_tok.line, self.doc.arena_tok.col, "missing root declaration")
        root = self.target(self.doc.root)
        multi = self.doc.multistage is not None or any(isinstance(v, MSNode) for v in views.values())
        if multi and any(isinstance(v, Node) for v in views.values()):
            bad = next(t for t, k, _ in self.doc.defs.values() if k == "node")
            raise self.err(bad, "a multistage document cannot define single-agent nodes")
        if multi:
            cls = MSStrategySystem if profile else MSGameSystem
        else:
            cls = StrategySystem if profile else GameSystem
        return cls.from_states(arena, root, views)


def parse_game(text: str):
    """A census game (or multi-stage game) from document text.

    ``choose`` lines may be present; they must name node states but are
    otherwise ignored.
    """
    return _Builder(parse_document(text)).build(False)


def parse_profile(text: str):
    """A census strategy profile; every node needs a ``choose`` line."""
    return _Builder(parse_document(text)).build(True)


def parse_any(text: str):
    """A profile when the document chooses at every node, else a game."""
    doc = parse_document(text)
    nodes = [n for n, (_, k, _) in doc.defs.items() if k != "leaf"]
    profile = doc.profile or (bool(doc.chosen) and all(n in doc.chosen for n in nodes))
    return _Builder(doc).build(profile)


# -- canonical printing --------------------------------------------------------

def _word(x):
    s = str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return s
    if not IDENT.match(s):
        raise ValueError(f"{x!r} cannot be written as an identifier")
    return s


def state_names(system) -> dict:
    """Deterministic identifier for every reachable state of a census system."""
    refs = reachable(system)
    keep = all(isinstance(r, str) and IDENT.match(r) for r in refs)
    return {r: (r if keep else f"s{i}") for i, r in enumerate(refs)}


def _domain_text(dom):
    inv = {v: k for k, v in _PREFS.items()}
    if dom.values == INTEGERS:
        return f"int {inv[dom.pref_kind]}"
    head = "{" + ", ".join(_word(v) for v in dom.values) + "}"
    if dom.pref_kind == RELATION:
        pairs = sorted((x, y) for x, y in dom.relation if x != y)
        return f"{head} order {{" + ", ".join(f"{_word(x)} <= {_word(y)}" for x, y in pairs) + "}"
    return f"{head} {inv[dom.pref_kind]}"


def to_dsl(system) -> str:
    """Canonical document text for a census system without payoff translation."""
    system.require_census("printing a document")
    if system.translated:
        raise NoCensus("payoff-translated families are not regular trees and have no document form")
    arena = system.arena
    names = state_names(system)
    out = ["arena {", "  agents " + ", ".join(_word(a) for a in arena.agents) + ";"]
    for a, sp in zip(arena.agents, arena.spaces):
        if isinstance(sp, Enumerated):
            out.append(f"  choices {_word(a)} {{" + ", ".join(_word(c) for c in sp.labels) + "};")
        else:
            out.append(f"  choices {_word(a)} nat;")
    for a, dom in zip(arena.agents, arena.domains):
        out.append(f"  utility {_word(a)} {_domain_text(dom)};")
    out.append("}")
    chooses = []
    for ref, name in names.items():
        v = system.unfold(ref)
        if v.is_leaf:
            body = ", ".join(f"{_word(a)}: {_word(x)}" for a, x in v.payoff.items)
            out.append(f"def {name} = leaf {{{body}}};")
            continue
        if getattr(v, "joint", False):
            arrows = ", ".join("(" + ", ".join(_word(c) for c in j) + f") -> {names[v.branch[j]]}"
                               for j in arena.joint_choices()[0])
            out.append(f"def {name} = msnode {{{arrows}}};")
            if v.chosen is not None:
                chooses.append(f"choose {name} = (" + ", ".join(_word(c) for c in v.chosen) + ");")
            continue
        arrows = ", ".join(f"{_word(c)} -> {names[v.branch[c]]}" for c in arena.space(v.agent).labels)
        out.append(f"def {name} = node {_word(v.agent)} {{{arrows}}};")
        if v.chosen is not None:
            chooses.append(f"choose {name} = {_word(v.chosen)};")
    out.append(f"root {names[system.root]};")
    if system.is_profile:
        out.append("profile;")
    if isinstance(system, MSGameSystem):
        out.append("multistage;")
    out.extend(chooses)
    return "\n".join(out) + "\n"
