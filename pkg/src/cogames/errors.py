"""Exception hierarchy shared by every analysis."""


class GameError(Exception):
    """Base class for errors raised by cogames."""


class ConstructionError(GameError):
    """A game, profile or arena violates its typing invariants."""


class ArenaMismatch(GameError):
    pass


class UnboundedBranch(GameError):
    """An exhaustive traversal met a node whose choice space is the naturals."""


class NoCensus(GameError):
    """The analysis needs a finite-state system with an explicit census."""


class NotFiniteTree(GameError):
    pass


class NoMaximalChoice(GameError):
    """Backward induction found a node where no choice dominates all others."""


class TooBroad(GameError):
    pass


class NaturalsNotSupported(GameError):
    pass


class ParseError(GameError):
    """Lexical, syntactic or semantic error in a game document."""

    def __init__(self, line, column, message):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message
