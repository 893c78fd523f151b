"""Shared primitives: grid coordinates, headings, graded alerts, error types."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple


class GridCoord(NamedTuple):
    """A walkable cell. x grows east, z grows south; the origin is north-west."""

    x: int
    z: int

    def __str__(self) -> str:
        return f"{self.x},{self.z}"


# Unit step for each compass heading in the (x, z) plane.
HEADING_VECTORS: dict[str, tuple[int, int]] = {
    "N": (0, -1),
    "E": (1, 0),
    "S": (0, 1),
    "W": (-1, 0),
}

HEADINGS = tuple(HEADING_VECTORS)


def heading_vector(heading: str) -> tuple[int, int]:
    try:
        return HEADING_VECTORS[heading]
    except KeyError:
        raise DomainError(f"unknown heading {heading!r}; expected one of {HEADINGS}") from None


def heading_from_step(dx: int, dz: int) -> str:
    for name, vec in HEADING_VECTORS.items():
        if vec == (dx, dz):
            return name
    raise DomainError(f"({dx}, {dz}) is not a unit grid step")


class Severity(IntEnum):
    """Graded severity for alerts; comparisons follow escalation order."""

    INFO = 0
    WARNING = 1
    STRONG = 2
    ERROR = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Severity":
        return cls[label.upper()]


# Alert codes raised by resolution and execution.
QUANT_SHORTFALL = "QUANT_SHORTFALL"
AMBIGUOUS_THE = "AMBIGUOUS_THE"
THE_ONLY_VIOLATION = "THE_ONLY_VIOLATION"
NO_SAME_IN_HISTORY = "NO_SAME_IN_HISTORY"
NO_DIFFERENT_LEFT = "NO_DIFFERENT_LEFT"
BOTH_COUNT = "BOTH_COUNT"
EITHER_COUNT = "EITHER_COUNT"
RELATION_INAPPLICABLE = "RELATION_INAPPLICABLE"
EMPTY_SELECTION = "EMPTY_SELECTION"
AMBIGUOUS_REGION = "AMBIGUOUS_REGION"
DEGRADED_DEGREE = "DEGRADED_DEGREE"
REGION_UNREACHABLE = "REGION_UNREACHABLE"
PATH_BLOCKED = "PATH_BLOCKED"
ACT_FAILED = "ACT_FAILED"
INVALID_TARGET = "INVALID_TARGET"
UNKNOWN_LOCATION = "UNKNOWN_LOCATION"


@dataclass(frozen=True)
class Alert:
    """A graded notice attached to a resolution or raised during execution."""

    severity: Severity
    code: str
    message: str

    def to_payload(self) -> dict:
        return {"severity": self.severity.label, "code": self.code, "message": self.message}


class GridspeakError(Exception):
    """Base class for errors raised by this package."""


class LoadError(GridspeakError):
    """A world, script, or config document failed validation."""


class DomainError(GridspeakError):
    """An operation was called with arguments outside its domain."""


class ResolutionError(GridspeakError):
    """A referring expression could not be interpreted against the world."""


class PathError(GridspeakError):
    """A path request could not be satisfied (empty band, bad count)."""


class PlanError(GridspeakError):
    """An instruction could not be turned into an executable plan."""


class ParseError(GridspeakError):
    """Input text violated the command grammar.

    Carries the index of the offending token and its character offset in the
    raw line so callers can point at it.
    """

    def __init__(self, message: str, token_index: int, char_start: int = -1, expected: str = ""):
        super().__init__(message)
        self.message = message
        self.token_index = token_index
        self.char_start = char_start
        self.expected = expected

    def to_payload(self) -> dict:
        return {
            "error": "parse",
            "message": self.message,
            "tokenIndex": self.token_index,
            "charStart": self.char_start,
            "expected": self.expected,
        }
