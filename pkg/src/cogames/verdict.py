"""Three-valued results for semi-decidable predicates."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any


class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: holds, fails with a replayable witness, or unknown.

    Verdicts deliberately refuse to act as booleans; callers must branch on
    :attr:`status` so that an ``Unknown`` is never silently read as false.
    ``data`` carries operation-specific extras (a profile count, an SPE
    certificate, a witness profile).
    """

    status: Status
    witness: Any = None
    reason: str = ""
    data: Any = None

    @classmethod
    def holds(cls, reason="", data=None):
        return cls(Status.HOLDS, None, reason, data)

    @classmethod
    def fails(cls, witness, reason="", data=None):
        return cls(Status.FAILS, witness, reason, data)

    @classmethod
    def unknown(cls, spent, reason=""):
        return cls(Status.UNKNOWN, spent, reason)

    @property
    def held(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def failed(self) -> bool:
        return self.status is Status.FAILS

    @property
    def undecided(self) -> bool:
        return self.status is Status.UNKNOWN

    def __bool__(self):
        raise TypeError("a Verdict is three-valued; test .status instead of truthiness")

    def __str__(self):
        s = self.status.value
        if self.reason:
            s += f": {self.reason}"
        return s
