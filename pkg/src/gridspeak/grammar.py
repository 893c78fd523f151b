"""Command grammar: tokenizer, recursive-descent parser, and unparser.

The surface language is a controlled English imperative::

    instruction := VERB ("to"|"in"|"on"|"at")? objectspec
    objectspec  := regionref pp*
                 | selector? property* OBJTYPE? pp*
    selector    := DET | QUANT | "your" QUANT?
    pp          := OBJREL objectspec ("and" conjunct)*
                 | PATHREL objectspec
                 | ("in"|"to"|"on"|"at") regionref
                 | ("in"|"to"|"on"|"at") LOCID
                 | ("to"|"on") objectspec          -- goal marker
    regionref   := "the"? (DEGREE|MODIFIER)* REGION ("of" LOCID)?

Multiword lexemes ("a couple of", "in front of", "pick up", location and type
names) merge into single tokens by longest match. Plural heads normalize to
the singular type name. "near" is a degree/modifier before a region noun and
a close-to relation before an object noun phrase.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .core import ParseError
from .world import WorldState

# Canonical relation names used across resolution and execution.
REL_FRONT = "in_front_of"
REL_BEHIND = "behind"
REL_LEFT = "left_of"
REL_RIGHT = "right_of"
REL_ABOVE = "above"
REL_UNDER = "under"
REL_CLOSE = "close_to"

RELATION_SURFACES: dict[str, str] = {
    "in front of": REL_FRONT,
    "behind": REL_BEHIND,
    "to the left of": REL_LEFT,
    "to the right of": REL_RIGHT,
    "above": REL_ABOVE,
    "under": REL_UNDER,
    "close to": REL_CLOSE,
    "near": REL_CLOSE,
}

RELATION_EMIT: dict[str, str] = {
    REL_FRONT: "in front of",
    REL_BEHIND: "behind",
    REL_LEFT: "to the left of",
    REL_RIGHT: "to the right of",
    REL_ABOVE: "above",
    REL_UNDER: "under",
    REL_CLOSE: "close to",
}

GOAL_RELATIONS = {"to": REL_CLOSE, "on": REL_ABOVE}
GOAL_EMIT = {REL_CLOSE: "to", REL_ABOVE: "on"}

DETERMINER_SURFACES: dict[str, str] = {
    "a": "a",
    "an": "a",
    "the": "the",
    "the only": "the only",
    "the same": "the same",
    "different": "different",
    "a different": "different",
    "both": "both",
    "either": "either",
}

QUANTIFIER_SURFACES: dict[str, str] = {
    "all": "all",
    "a lot of": "a lot of",
    "many": "many",
    "several": "several",
    "a few": "a few",
    "a couple": "a couple",
    "a couple of": "a couple",
    "any": "any",
}

QUANTIFIER_EMIT = {"a couple": "a couple of"}

PATH_KINDS = ("along", "around")
REGION_NOUNS = ("corner", "end", "middle", "side")
DEGREE_WORDS = ("strict", "proximate", "near")
MODIFIER_WORDS = ("far", "near", "left", "right")
PREPOSITIONS = ("in", "to", "on", "at")
STOPWORDS = frozenset({"that", "which", "is", "are"})

IRREGULAR_PLURALS = {
    "mice": "mouse",
    "geese": "goose",
    "feet": "foot",
    "teeth": "tooth",
    "children": "child",
    "people": "person",
    "men": "man",
    "women": "woman",
}

_KEYWORDS = (
    set(RELATION_SURFACES)
    | set(DETERMINER_SURFACES)
    | set(QUANTIFIER_SURFACES)
    | set(PATH_KINDS)
    | set(REGION_NOUNS)
    | set(DEGREE_WORDS)
    | set(MODIFIER_WORDS)
    | set(PREPOSITIONS)
    | {"your", "and", "of", "the"}
)


@dataclass(frozen=True)
class Token:
    text: str
    start: int


@dataclass(frozen=True)
class Lexicon:
    """Vocabulary the tokenizer and parser resolve surface words against."""

    verbs: dict[str, str]  # surface -> canonical verb
    types: frozenset[str]
    locations: dict[str, str]  # lowercase surface -> declared id

    @classmethod
    def build(cls, registry: dict, world: WorldState | None = None) -> "Lexicon":
        verbs: dict[str, str] = {}
        for verb, action in registry.items():
            verbs[verb.lower()] = verb
            for alias in action.aliases:
                verbs[alias.lower()] = verb
        types = frozenset(t.lower() for t in world.types.names()) if world else frozenset()
        locations = {loc.lower(): loc for loc in world.locations} if world else {}
        return cls(verbs=verbs, types=types, locations=locations)

    def multiword_phrases(self) -> list[tuple[str, ...]]:
        """Phrases to merge during tokenization, longest first."""
        phrases: set[tuple[str, ...]] = set()
        fixed = (
            list(RELATION_SURFACES)
            + list(DETERMINER_SURFACES)
            + list(QUANTIFIER_SURFACES)
            + list(self.verbs)
            + list(self.locations)
        )
        for surface in fixed:
            words = tuple(surface.split())
            if len(words) > 1:
                phrases.add(words)
        for type_name in self.types:
            words = tuple(type_name.split())
            if len(words) > 1:
                phrases.add(words)
                plural = words[:-1] + (words[-1] + "s",)
                phrases.add(plural)
        return sorted(phrases, key=len, reverse=True)


def tokenize(text: str, lexicon: Lexicon) -> list[Token]:
    """Lowercase word tokens with raw-string offsets; multiword lexemes merged."""
    words = [(m.group(0).lower(), m.start()) for m in re.finditer(r"[A-Za-z0-9']+", text)]
    if words and words[0][0].isdigit():
        words = words[1:]  # leading script line number
    words = [(w, s) for w, s in words if w not in STOPWORDS]
    phrases = lexicon.multiword_phrases()
    tokens: list[Token] = []
    i = 0
    while i < len(words):
        merged = None
        for phrase in phrases:
            k = len(phrase)
            if i + k <= len(words) and tuple(w for w, _ in words[i : i + k]) == phrase:
                merged = Token(" ".join(phrase), words[i][1])
                i += k
                break
        if merged is None:
            merged = Token(words[i][0], words[i][1])
            i += 1
        tokens.append(merged)
    return tokens


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class RegionRef:
    kind: str
    degree: str | None = None
    modifiers: frozenset[str] = frozenset()
    location: str | None = None  # lowercase surface form


@dataclass(frozen=True)
class ObjectSpec:
    determiner: str | None = None
    quantifier: str | None = None
    owned: bool = False
    properties: tuple[str, ...] = ()
    head_type: str | None = None
    region: RegionRef | None = None
    constraints: tuple["Constraint", ...] = ()


@dataclass(frozen=True)
class RelationConstraint:
    relation: str
    ground: ObjectSpec
    goal_marker: bool = False


@dataclass(frozen=True)
class RegionConstraint:
    region: RegionRef


@dataclass(frozen=True)
class LocationConstraint:
    location: str  # lowercase surface form


@dataclass(frozen=True)
class PathConstraint:
    kind: str
    ground: ObjectSpec


Constraint = RelationConstraint | RegionConstraint | LocationConstraint | PathConstraint


@dataclass(frozen=True)
class Instruction:
    verb: str
    spec: ObjectSpec
    raw_text: str = field(default="", compare=False)


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token], lexicon: Lexicon, raw: str):
        self.tokens = tokens
        self.lexicon = lexicon
        self.raw = raw
        self.pos = 0

    # helpers

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, expected: str = "") -> ParseError:
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            return ParseError(
                f"{message} at token {self.pos} ({tok.text!r})",
                token_index=self.pos,
                char_start=tok.start,
                expected=expected,
            )
        return ParseError(
            f"{message} at end of input",
            token_index=len(self.tokens),
            char_start=len(self.raw),
            expected=expected,
        )

    def head_type_of(self, word: str) -> str | None:
        """Match a token against the type vocabulary, normalizing plurals."""
        if word in self.lexicon.types:
            return word
        candidates = []
        if word in IRREGULAR_PLURALS:
            candidates.append(IRREGULAR_PLURALS[word])
        last = word.split()[-1]
        prefix = word[: len(word) - len(last)]
        if last in IRREGULAR_PLURALS:
            candidates.append(prefix + IRREGULAR_PLURALS[last])
        if last.endswith("ies"):
            candidates.append(prefix + last[:-3] + "y")
        if last.endswith("es"):
            candidates.append(prefix + last[:-2])
        if last.endswith("s") and not last.endswith("ss"):
            candidates.append(prefix + last[:-1])
        for cand in candidates:
            if cand in self.lexicon.types:
                return cand
        return None

    # grammar rules

    def parse_instruction(self) -> Instruction:
        tok = self.peek()
        if tok is None:
            raise self.fail("empty instruction", expected="verb")
        verb = self.lexicon.verbs.get(tok.text)
        if verb is None:
            raise self.fail(f"unknown verb {tok.text!r}", expected="verb")
        self.advance()
        nxt = self.peek()
        if nxt is not None and nxt.text in PREPOSITIONS:
            # Optional marker before a navigation target ("go to the corner");
            # left in place before a bare location so the pp rule can claim it.
            after = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            if after is not None and after.text not in self.lexicon.locations:
                self.advance()
        spec = self.parse_objectspec()
        if self.peek() is not None:
            raise self.fail("unexpected trailing token")
        return Instruction(verb=verb, spec=spec, raw_text=self.raw)

    def parse_objectspec(self) -> ObjectSpec:
        region = self.try_region_phrase()
        if region is not None:
            constraints = self.parse_pps()
            return ObjectSpec(region=region, constraints=constraints)

        determiner, quantifier, owned = self.parse_selector()
        properties: list[str] = []
        head_type: str | None = None
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.text in _KEYWORDS or tok.text in self.lexicon.verbs:
                break
            matched = self.head_type_of(tok.text)
            if matched is not None:
                head_type = matched
                self.advance()
                break
            if tok.text in self.lexicon.locations:
                break
            properties.append(tok.text)
            self.advance()
        if head_type is None:
            if properties:
                raise self.fail("expected an object type", expected="object type")
            if determiner is None and quantifier is None and not owned:
                tok = self.peek()
                starts_pp = tok is not None and (
                    tok.text in RELATION_SURFACES or tok.text in PATH_KINDS or tok.text in PREPOSITIONS
                )
                if not starts_pp:
                    raise self.fail("expected an object type or region", expected="object type")
            else:
                raise self.fail("expected an object type", expected="object type")
        constraints = self.parse_pps()
        if head_type is None and not constraints:
            raise self.fail("instruction names no object, region, or path")
        return ObjectSpec(
            determiner=determiner,
            quantifier=quantifier,
            owned=owned,
            properties=tuple(properties),
            head_type=head_type,
            constraints=constraints,
        )

    def parse_selector(self) -> tuple[str | None, str | None, bool]:
        tok = self.peek()
        if tok is None:
            return None, None, False
        if tok.text == "your":
            self.advance()
            nxt = self.peek()
            quantifier = None
            if nxt is not None and nxt.text in QUANTIFIER_SURFACES:
                quantifier = QUANTIFIER_SURFACES[nxt.text]
                self.advance()
            return None, quantifier, True
        if tok.text in DETERMINER_SURFACES:
            self.advance()
            nxt = self.peek()
            if nxt is not None and (nxt.text in DETERMINER_SURFACES or nxt.text in QUANTIFIER_SURFACES):
                raise self.fail("selector repeated", expected="property or object type")
            return DETERMINER_SURFACES[tok.text], None, False
        if tok.text in QUANTIFIER_SURFACES:
            self.advance()
            if tok.text in ("a couple", "a lot of") and self.peek() is not None and self.peek().text == "of":
                self.advance()  # tolerate a stray "of" the merge missed
            nxt = self.peek()
            if nxt is not None and nxt.text == "your":
                self.advance()  # "a couple of your ..." == "your a couple of ..."
                return None, QUANTIFIER_SURFACES[tok.text], True
            if nxt is not None and (nxt.text in DETERMINER_SURFACES or nxt.text in QUANTIFIER_SURFACES):
                raise self.fail("selector repeated", expected="property or object type")
            return None, QUANTIFIER_SURFACES[tok.text], False
        return None, None, False

    def try_region_phrase(self) -> RegionRef | None:
        """regionref := "the"? (DEGREE|MODIFIER)* REGION ("of" LOCID)?"""
        save = self.pos
        words: list[str] = []
        saw_the = False
        kind: str | None = None
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.text in REGION_NOUNS:
                kind = tok.text
                self.advance()
                break
            if tok.text == "the" and not saw_the and not words:
                saw_the = True
                self.advance()
                continue
            if tok.text in DEGREE_WORDS or tok.text in MODIFIER_WORDS:
                words.append(tok.text)
                self.advance()
                continue
            break
        if kind is None:
            self.pos = save
            return None
        degree: str | None = None
        modifiers: set[str] = set()
        single_instance = kind == "middle"
        for word in words:
            as_degree = word in ("strict", "proximate") or (word == "near" and single_instance)
            if as_degree:
                if degree is not None and degree != word:
                    self.pos = save
                    raise self.fail(f"conflicting degrees {degree!r} and {word!r}")
                degree = word
            else:
                modifiers.add(word)
        if {"left", "right"} <= modifiers or {"near", "far"} <= modifiers:
            self.pos = save
            raise self.fail(f"contradictory modifiers {sorted(modifiers)}")
        location = None
        tok = self.peek()
        if tok is not None and tok.text == "of":
            self.advance()
            loc_tok = self.peek()
            if loc_tok is None or loc_tok.text not in self.lexicon.locations:
                raise self.fail("expected a location name after 'of'", expected="location")
            location = loc_tok.text
            self.advance()
        return RegionRef(kind=kind, degree=degree, modifiers=frozenset(modifiers), location=location)

    def parse_conjunct(self, template: ObjectSpec) -> ObjectSpec:
        """An "and"-coordinated ground NP sharing the first ground's selector."""
        properties: list[str] = []
        head_type: str | None = None
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.text in _KEYWORDS or tok.text in self.lexicon.verbs:
                break
            matched = self.head_type_of(tok.text)
            if matched is not None:
                head_type = matched
                self.advance()
                break
            properties.append(tok.text)
            self.advance()
        if head_type is None:
            raise self.fail("expected an object type after 'and'", expected="object type")
        constraints = self.parse_pps()
        return ObjectSpec(
            determiner=template.determiner,
            quantifier=template.quantifier,
            owned=template.owned,
            properties=tuple(properties),
            head_type=head_type,
            constraints=constraints,
        )

    def parse_pps(self) -> tuple[Constraint, ...]:
        constraints: list[Constraint] = []
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.text in set(DEGREE_WORDS) | set(MODIFIER_WORDS) | set(REGION_NOUNS):
                # A bare region phrase ("near middle of Hallway 1"); "near"
                # followed by an object NP falls through to the relation rule.
                region = self.try_region_phrase()
                if region is not None:
                    constraints.append(RegionConstraint(region))
                    continue
            if tok.text in RELATION_SURFACES:
                self.advance()
                relation = RELATION_SURFACES[tok.text]
                ground = self.parse_objectspec()
                if ground.head_type is None and ground.region is None:
                    raise self.fail(f"relation {tok.text!r} needs an object phrase")
                constraints.append(RelationConstraint(relation, ground))
                while self.peek() is not None and self.peek().text == "and":
                    self.advance()
                    conjunct = self.parse_conjunct(ground)
                    constraints.append(RelationConstraint(relation, conjunct))
                continue
            if tok.text in PATH_KINDS:
                self.advance()
                ground = self.parse_objectspec()
                if ground.head_type is None:
                    raise self.fail(f"path relation {tok.text!r} needs an object phrase")
                constraints.append(PathConstraint(tok.text, ground))
                continue
            if tok.text in PREPOSITIONS:
                save = self.pos
                self.advance()
                region = self.try_region_phrase()
                if region is not None:
                    constraints.append(RegionConstraint(region))
                    continue
                nxt = self.peek()
                if nxt is not None and nxt.text in self.lexicon.locations:
                    self.advance()
                    constraints.append(LocationConstraint(nxt.text))
                    continue
                if tok.text in GOAL_RELATIONS:
                    ground = self.parse_objectspec()
                    if ground.head_type is None:
                        raise self.fail(f"expected an object phrase after {tok.text!r}")
                    constraints.append(RelationConstraint(GOAL_RELATIONS[tok.text], ground, goal_marker=True))
                    while self.peek() is not None and self.peek().text == "and":
                        self.advance()
                        conjunct = self.parse_conjunct(ground)
                        constraints.append(
                            RelationConstraint(GOAL_RELATIONS[tok.text], conjunct, goal_marker=True)
                        )
                    continue
                self.pos = save
                raise self.fail(f"expected a region or location after {tok.text!r}", expected="region")
            break
        return tuple(constraints)


def parse_instruction(text: str, lexicon: Lexicon) -> Instruction:
    tokens = tokenize(text, lexicon)
    return _Parser(tokens, lexicon, text).parse_instruction()


# -- unparser ------------------------------------------------------------------


def _emit_region(region: RegionRef) -> str:
    parts = []
    if region.degree:
        parts.append(region.degree)
    for word in ("near", "far", "left", "right"):
        if word in region.modifiers:
            parts.append(word)
    parts.append(region.kind)
    if region.location:
        parts.extend(["of", region.location])
    return " ".join(parts)


def _and_binds_here(ground: ObjectSpec) -> bool:
    """True when an "and" emitted after this ground reattaches at its owner.

    The parser is right-greedy: if the ground's own phrase ends in a relation
    or path, a following "and" would coordinate with that deeper relation
    instead, so such grounds cannot precede a conjunct.
    """
    if not ground.constraints:
        return True
    return isinstance(ground.constraints[-1], (RegionConstraint, LocationConstraint))


def _conjoinable(prev_ground: ObjectSpec, template: ObjectSpec, nxt, relation: str, goal: bool) -> bool:
    """Whether ``nxt`` can be emitted as an "and" conjunct of the current run."""
    if not isinstance(nxt, RelationConstraint):
        return False
    if nxt.relation != relation or nxt.goal_marker != goal:
        return False
    ground = nxt.ground
    if ground.region is not None or ground.head_type is None:
        return False
    if (ground.determiner, ground.quantifier, ground.owned) != (
        template.determiner,
        template.quantifier,
        template.owned,
    ):
        return False
    return _and_binds_here(prev_ground)


def _emit_constraints(constraints: tuple[Constraint, ...]) -> list[str]:
    parts: list[str] = []
    i = 0
    while i < len(constraints):
        constraint = constraints[i]
        if isinstance(constraint, RelationConstraint):
            if constraint.goal_marker:
                parts.append(GOAL_EMIT[constraint.relation])
            else:
                parts.append(RELATION_EMIT[constraint.relation])
            parts.append(_emit_spec(constraint.ground))
            template = constraint.ground
            prev = constraint.ground
            while i + 1 < len(constraints) and _conjoinable(
                prev, template, constraints[i + 1], constraint.relation, constraint.goal_marker
            ):
                i += 1
                conjunct = constraints[i].ground
                parts.append("and")
                parts.extend(conjunct.properties)
                parts.append(conjunct.head_type)
                parts.extend(_emit_constraints(conjunct.constraints))
                prev = conjunct
        elif isinstance(constraint, RegionConstraint):
            parts.append("in")
            parts.append(_emit_region(constraint.region))
        elif isinstance(constraint, LocationConstraint):
            parts.extend(["in", constraint.location])
        elif isinstance(constraint, PathConstraint):
            parts.append(constraint.kind)
            parts.append(_emit_spec(constraint.ground))
        i += 1
    return parts


def _emit_spec(spec: ObjectSpec) -> str:
    parts: list[str] = []
    if spec.region is not None:
        parts.append(_emit_region(spec.region))
    else:
        if spec.owned:
            parts.append("your")
            if spec.quantifier:
                parts.append(QUANTIFIER_EMIT.get(spec.quantifier, spec.quantifier))
        elif spec.determiner:
            parts.append(spec.determiner)
        elif spec.quantifier:
            parts.append(QUANTIFIER_EMIT.get(spec.quantifier, spec.quantifier))
        parts.extend(spec.properties)
        if spec.head_type:
            parts.append(spec.head_type)
    parts.extend(_emit_constraints(spec.constraints))
    return " ".join(parts)


def unparse(instruction: Instruction) -> str:
    spec = instruction.spec
    marker = " to" if spec.region is not None else ""
    return f"{instruction.verb}{marker} {_emit_spec(spec)}".strip()
