"""Loadable configuration: the action registry and the quantifier table."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core import LoadError

EFFECTS = ("consume", "acquire", "place", "transform", "none")


@dataclass(frozen=True)
class ActionDef:
    """How a verb behaves when executed."""

    verb: str
    effect: str
    requires_target: bool = True
    duration_ticks: int = 1
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise LoadError(f"verb {self.verb!r} has unknown effect {self.effect!r}")
        if self.duration_ticks < 1:
            raise LoadError(f"verb {self.verb!r} durationTicks must be a positive integer")


DEFAULT_ACTIONS: tuple[ActionDef, ...] = (
    ActionDef("go", "none", requires_target=False),
    ActionDef("stand", "none", requires_target=False),
    ActionDef("eat", "consume"),
    ActionDef("pickup", "acquire", aliases=("pick up",)),
    ActionDef("carry", "acquire"),
    ActionDef("deliver", "place"),
    ActionDef("pinup", "place", aliases=("pin up",)),
    ActionDef("water", "transform"),
    ActionDef("fill", "transform"),
)


def default_registry() -> dict[str, ActionDef]:
    return {a.verb: a for a in DEFAULT_ACTIONS}


def load_action_registry(path: str | Path | None = None) -> dict[str, ActionDef]:
    """Verb definitions from a YAML list; None loads the built-in registry."""
    if path is None:
        return default_registry()
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise LoadError(f"cannot read action registry {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise LoadError(f"action registry is not valid YAML: {exc}") from exc
    if not isinstance(doc, list):
        raise LoadError("action registry must be a list of verb entries")
    registry: dict[str, ActionDef] = {}
    for entry in doc:
        if not isinstance(entry, dict):
            raise LoadError("action registry entries must be mappings")
        unknown = set(entry) - {"verb", "effect", "requiresTarget", "durationTicks", "aliases"}
        if unknown:
            raise LoadError(f"action entry has unknown keys: {sorted(unknown)}")
        if "verb" not in entry or "effect" not in entry:
            raise LoadError("action entries need at least verb and effect")
        verb = str(entry["verb"])
        if verb in registry:
            raise LoadError(f"verb {verb!r} declared twice")
        aliases = entry.get("aliases", []) or []
        if not isinstance(aliases, list):
            raise LoadError(f"verb {verb!r} aliases must be a list")
        registry[verb] = ActionDef(
            verb=verb,
            effect=str(entry["effect"]),
            requires_target=bool(entry.get("requiresTarget", True)),
            duration_ticks=int(entry.get("durationTicks", 1)),
            aliases=tuple(str(a) for a in aliases),
        )
    return registry


ALL = "all"

DEFAULT_QUANTIFIERS: dict[str, int | None] = {
    ALL: None,  # resolves to however many candidates exist
    "a lot of": 10,
    "many": 8,
    "several": 6,
    "a few": 4,
    "a couple": 2,
    "any": 1,
}


@dataclass(frozen=True)
class QuantifierTable:
    """Quantifier-to-count mapping; ``all`` always means every candidate."""

    values: dict[str, int | None] = field(default_factory=lambda: dict(DEFAULT_QUANTIFIERS))

    def names(self) -> list[str]:
        return list(self.values)

    def value(self, quantifier: str, available: int) -> int:
        if quantifier not in self.values:
            raise LoadError(f"unknown quantifier {quantifier!r}")
        v = self.values[quantifier]
        return available if v is None else v

    @classmethod
    def from_file(cls, path: str | Path | None) -> "QuantifierTable":
        """Defaults overlaid with a flat YAML mapping of quantifier -> integer."""
        if path is None:
            return cls()
        try:
            doc = yaml.safe_load(Path(path).read_text())
        except OSError as exc:
            raise LoadError(f"cannot read quantifier config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise LoadError(f"quantifier config is not valid YAML: {exc}") from exc
        if doc is None:
            return cls()
        if not isinstance(doc, dict):
            raise LoadError("quantifier config must be a flat mapping of name -> integer")
        values = dict(DEFAULT_QUANTIFIERS)
        for key, val in doc.items():
            name = str(key)
            if name not in values:
                raise LoadError(f"unknown quantifier {name!r} in config")
            if name == ALL:
                raise LoadError("the quantifier 'all' always means every candidate; it cannot be overridden")
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise LoadError(f"quantifier {name!r} must map to a positive integer")
            values[name] = val
        return cls(values)
