"""The ambient signature of a game: agents, their choices and their utilities.

Choices and utilities depend on the agent.  Python has no dependent types,
so membership is checked at run time whenever a payoff, a node or a chosen
label is built; a violation is a :class:`ConstructionError`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Mapping

from .errors import ConstructionError


@dataclass(frozen=True)
class Enumerated:
    """A finite, ordered choice space."""

    labels: tuple

    def __post_init__(self):
        if not self.labels:
            raise ConstructionError("an enumerated choice space must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ConstructionError(f"duplicate choice labels in {self.labels!r}")

    finite = True

    def __contains__(self, label):
        return label in self.labels

    def __len__(self):
        return len(self.labels)

    def sample(self, nat_samples=None):
        return self.labels, False


@dataclass(frozen=True)
class Naturals:
    """The choice space of all nonnegative integers."""

    finite = False

    def __contains__(self, label):
        return isinstance(label, int) and not isinstance(label, bool) and label >= 0

    def sample(self, nat_samples):
        """First ``nat_samples`` labels, plus a flag saying the rest were elided."""
        return tuple(range(nat_samples)), True


NATURALS = Naturals()

INTEGERS = "int"

# preorder kinds
INT_LEQ = "leq"
RELATION = "order"
INDIFFERENCE = "indiff"
EQUALITY = "eq"

PREF_KINDS = (INT_LEQ, RELATION, INDIFFERENCE, EQUALITY)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def reflexive_transitive_closure(labels, pairs):
    rel = {(x, x) for x in labels} | set(pairs)
    for k in labels:
        for i in labels:
            if (i, k) not in rel:
                continue
            for j in labels:
                if (k, j) in rel:
                    rel.add((i, j))
    return frozenset(rel)


@dataclass(frozen=True)
class UtilityDomain:
    """Utility values of one agent and the preorder on them.

    ``values`` is either :data:`INTEGERS` or a tuple of symbolic labels.
    ``pref(x, y)`` reads "x is at most as good as y".
    """

    values: object
    pref_kind: str
    relation: frozenset = field(default=frozenset(), compare=True)

    def __post_init__(self):
        if self.pref_kind not in PREF_KINDS:
            raise ConstructionError(f"unknown preorder {self.pref_kind!r}")
        if self.values == INTEGERS:
            if self.pref_kind == RELATION:
                raise ConstructionError("an explicit relation needs a symbolic domain")
            return
        if not isinstance(self.values, tuple) or not self.values:
            raise ConstructionError("a symbolic utility domain needs a nonempty label tuple")
        if len(set(self.values)) != len(self.values):
            raise ConstructionError(f"duplicate utility labels in {self.values!r}")
        if self.pref_kind == INT_LEQ:
            raise ConstructionError("'leq' only applies to integer utilities")
        if self.pref_kind == RELATION:
            for x, y in self.relation:
                if x not in self.values or y not in self.values:
                    raise ConstructionError(f"pair ({x}, {y}) leaves the domain {self.values}")
            closed = reflexive_transitive_closure(self.values, self.relation)
            object.__setattr__(self, "relation", closed)
            self._verify_preorder()

    @classmethod
    def integers(cls, pref=INT_LEQ):
        return cls(INTEGERS, pref)

    @classmethod
    def symbolic(cls, labels, pref=EQUALITY, pairs=()):
        return cls(tuple(labels), pref, frozenset(pairs))

    @classmethod
    def ordered(cls, labels):
        """Symbolic labels ranked from worst to best."""
        labels = tuple(labels)
        return cls(labels, RELATION, frozenset(zip(labels, labels[1:])))

    def _verify_preorder(self):
        vals = self.values
        for x in vals:
            if not self.pref(x, x):
                raise ConstructionError(f"preorder is not reflexive at {x!r}")
        for x, y, z in product(vals, repeat=3):
            if self.pref(x, y) and self.pref(y, z) and not self.pref(x, z):
                raise ConstructionError(f"preorder is not transitive at {x!r}, {y!r}, {z!r}")

    @property
    def symbolic_values(self):
        return self.values != INTEGERS

    def __contains__(self, value):
        if self.values == INTEGERS:
            return _is_int(value)
        return value in self.values

    def pref(self, x, y) -> bool:
        kind = self.pref_kind
        if kind == INDIFFERENCE:
            return True
        if kind == EQUALITY:
            return x == y
        if kind == INT_LEQ:
            return x <= y
        return (x, y) in self.relation

    @property
    def total(self) -> bool:
        if self.pref_kind in (INT_LEQ, INDIFFERENCE):
            return True
        vals = self.values
        if vals == INTEGERS:
            return False
        return all(self.pref(x, y) or self.pref(y, x) for x, y in product(vals, repeat=2))

    @property
    def translation_invariant(self) -> bool:
        """Integer utilities whose preorder survives adding a constant to both sides."""
        return self.values == INTEGERS and self.pref_kind in (INT_LEQ, INDIFFERENCE, EQUALITY)

    def with_pref(self, pref_kind):
        if pref_kind == INT_LEQ and self.symbolic_values:
            raise ConstructionError("'leq' only applies to integer utilities")
        return UtilityDomain(self.values, pref_kind, self.relation if pref_kind == RELATION else frozenset())


@dataclass(frozen=True)
class Payoff:
    """A total assignment agent -> utility value.

    Stored as a tuple of pairs sorted by agent name so that equality and
    hashing are structural.
    """

    items: tuple

    @classmethod
    def of(cls, mapping: Mapping[str, object] | None = None, **kw) -> "Payoff":
        d = dict(mapping or {}, **kw)
        return cls(tuple(sorted(d.items(), key=lambda kv: kv[0])))

    def __getitem__(self, agent):
        for a, v in self.items:
            if a == agent:
                return v
        raise KeyError(agent)

    def agents(self):
        return tuple(a for a, _ in self.items)

    def as_dict(self):
        return dict(self.items)

    def shift(self, offset: int) -> "Payoff":
        if offset == 0:
            return self
        return Payoff(tuple((a, v + offset) for a, v in self.items))

    def __str__(self):
        return "(" + ", ".join(f"{a}={v}" for a, v in self.items) + ")"


@dataclass(frozen=True)
class ArenaSpec:
    """Agents, per-agent choice spaces and per-agent utility domains.

    Agents are identified by their display names; their index in ``agents``
    fixes the order used for joint choices and renderings.
    """

    agents: tuple
    spaces: tuple
    domains: tuple

    def __post_init__(self):
        if not self.agents:
            raise ConstructionError("an arena needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise ConstructionError(f"duplicate agents in {self.agents!r}")
        if not (len(self.spaces) == len(self.domains) == len(self.agents)):
            raise ConstructionError("every agent needs exactly one choice space and one utility domain")
        for a, sp, dom in zip(self.agents, self.spaces, self.domains):
            if not isinstance(sp, (Enumerated, Naturals)):
                raise ConstructionError(f"bad choice space for {a!r}: {sp!r}")
            if not isinstance(dom, UtilityDomain):
                raise ConstructionError(f"bad utility domain for {a!r}: {dom!r}")

    @classmethod
    def build(cls, spec: Mapping[str, tuple]) -> "ArenaSpec":
        """``spec`` maps agent -> (choice space, utility domain), in agent order.

        A choice space may be given as an iterable of labels.
        """
        agents, spaces, domains = [], [], []
        for agent, (space, dom) in spec.items():
            if not isinstance(space, (Enumerated, Naturals)):
                space = Enumerated(tuple(space))
            agents.append(agent)
            spaces.append(space)
            domains.append(dom)
        return cls(tuple(agents), tuple(spaces), tuple(domains))

    def index(self, agent) -> int:
        try:
            return self.agents.index(agent)
        except ValueError:
            raise ConstructionError(f"unknown agent {agent!r}") from None

    def space(self, agent):
        return self.spaces[self.index(agent)]

    def domain(self, agent) -> UtilityDomain:
        return self.domains[self.index(agent)]

    def pref(self, agent, x, y) -> bool:
        return self.domain(agent).pref(x, y)

    def payoff(self, mapping: Mapping[str, object] | None = None, **kw) -> Payoff:
        p = Payoff.of(mapping, **kw)
        self.check_payoff(p)
        return p

    def check_payoff(self, p: Payoff):
        if set(p.agents()) != set(self.agents):
            raise ConstructionError(f"payoff {p} does not cover exactly the agents {self.agents}")
        for a, v in p.items:
            if v not in self.domain(a):
                raise ConstructionError(f"utility {v!r} is outside the domain of {a!r}")

    def check_choice(self, agent, label):
        if label not in self.space(agent):
            raise ConstructionError(f"choice {label!r} is outside the space of {agent!r}")

    @property
    def all_enumerated(self) -> bool:
        return all(isinstance(sp, Enumerated) for sp in self.spaces)

    @property
    def translation_invariant(self) -> bool:
        return all(d.translation_invariant for d in self.domains)

    def with_pref(self, pref_kind) -> "ArenaSpec":
        """Same arena with every agent's preorder replaced by ``pref_kind``."""
        return ArenaSpec(self.agents, self.spaces, tuple(d.with_pref(pref_kind) for d in self.domains))

    def joint_choices(self, nat_samples=None) -> tuple[tuple, bool]:
        """Joint choices in lexicographic agent order, and whether any were elided."""
        pools, elided = [], False
        for sp in self.spaces:
            labels, cut = sp.sample(nat_samples)
            pools.append(labels)
            elided |= cut
        return tuple(product(*pools)), elided


def unit_domain(label: Hashable = "tt") -> UtilityDomain:
    return UtilityDomain.symbolic((label,), EQUALITY)
