"""Referent resolution: from a parsed instruction to targets plus graded alerts."""
from __future__ import annotations

from dataclasses import dataclass, replace

from . import regions as regions_mod
from . import relations as relations_mod
from .config import ActionDef, QuantifierTable
from .core import (
    AMBIGUOUS_THE,
    Alert,
    BOTH_COUNT,
    EITHER_COUNT,
    EMPTY_SELECTION,
    GridCoord,
    INVALID_TARGET,
    NO_DIFFERENT_LEFT,
    NO_SAME_IN_HISTORY,
    PATH_BLOCKED,
    PathError,
    QUANT_SHORTFALL,
    REGION_UNREACHABLE,
    RELATION_INAPPLICABLE,
    ResolutionError,
    Severity,
    THE_ONLY_VIOLATION,
    UNKNOWN_LOCATION,
)
from .grammar import (
    Instruction,
    LocationConstraint,
    ObjectSpec,
    PathConstraint,
    REL_ABOVE,
    REL_BEHIND,
    REL_CLOSE,
    REL_FRONT,
    REL_LEFT,
    REL_RIGHT,
    REL_UNDER,
    RegionConstraint,
    RegionRef,
    RelationConstraint,
)
from .relations import PathSpec
from .world import AgentState, WorldObject, WorldState

DEFAULT_SEED = 7
DEFAULT_ALONG_COUNT = 4
DEFAULT_AROUND_COUNT = 8

_SECTOR_BY_RELATION = {
    REL_FRONT: relations_mod.FRONT,
    REL_BEHIND: relations_mod.BACK,
    REL_LEFT: relations_mod.LEFT,
    REL_RIGHT: relations_mod.RIGHT,
}


@dataclass(frozen=True)
class RegionGoal:
    """A region navigation target; degree None means fall back strict->near."""

    location_id: str
    kind: str
    instance: str
    degree: str | None

    def to_payload(self) -> dict:
        return {
            "location": self.location_id,
            "kind": self.kind,
            "instance": self.instance,
            "degree": self.degree,
        }


@dataclass(frozen=True)
class Resolution:
    """Resolved targets for one instruction plus every alert raised on the way."""

    objects: tuple[str, ...] = ()
    cells: tuple[GridCoord, ...] = ()
    path: PathSpec | None = None
    region_goal: RegionGoal | None = None
    destination: str | None = None
    warnings: tuple[Alert, ...] = ()

    @property
    def kind(self) -> str:
        if self.objects:
            return "objects"
        if self.path is not None:
            return "path"
        if self.cells or self.region_goal is not None:
            return "cells"
        return "none"

    @property
    def is_error(self) -> bool:
        return any(w.severity == Severity.ERROR for w in self.warnings)

    def to_payload(self) -> dict:
        return {
            "kind": self.kind,
            "objects": list(self.objects),
            "cells": [[c.x, c.z] for c in self.cells],
            "path": self.path.to_payload() if self.path else None,
            "regionGoal": self.region_goal.to_payload() if self.region_goal else None,
            "destination": self.destination,
            "warnings": [w.to_payload() for w in self.warnings],
        }


def quantifier_value(quantifier: str, available: int, table: QuantifierTable | None = None) -> int:
    return (table or QuantifierTable()).value(quantifier, available)


def select_with_quantifier(
    candidates: list[str], quantifier: str, table: QuantifierTable | None = None
) -> tuple[list[str], list[Alert]]:
    """First-n selection with shortfall and empty alerts."""
    alerts: list[Alert] = []
    requested = quantifier_value(quantifier, len(candidates), table)
    if len(candidates) < requested:
        alerts.append(
            Alert(
                Severity.WARNING,
                QUANT_SHORTFALL,
                f"requested {requested} ({quantifier}) but only {len(candidates)} available",
            )
        )
        selected = list(candidates)
    else:
        selected = candidates[:requested]
    if not selected:
        alerts.append(Alert(Severity.ERROR, EMPTY_SELECTION, "no objects match the description"))
    return selected, alerts


def select_with_determiner(
    candidates: list[str], determiner: str, agent: AgentState, verb: str
) -> tuple[list[str], list[Alert]]:
    """Selection behavior for each determiner, including history-sensitive ones."""
    alerts: list[Alert] = []
    n = len(candidates)

    def empty() -> tuple[list[str], list[Alert]]:
        alerts.append(Alert(Severity.ERROR, EMPTY_SELECTION, "no objects match the description"))
        return [], alerts

    if determiner == "a":
        return (candidates[:1], alerts) if n else empty()

    if determiner == "the":
        if n == 0:
            return empty()
        if n > 1:
            alerts.append(
                Alert(Severity.WARNING, AMBIGUOUS_THE, f"'the' matched {n} objects; using {candidates[0]}")
            )
        return candidates[:1], alerts

    if determiner == "the only":
        if n == 0:
            return empty()
        if n > 1:
            alerts.append(
                Alert(
                    Severity.STRONG,
                    THE_ONLY_VIOLATION,
                    f"'the only' expected a unique object but {n} match; using {candidates[0]}",
                )
            )
        return candidates[:1], alerts

    if determiner == "the same":
        for record in reversed(agent.history):
            if record.verb == verb and record.object_id in candidates:
                return [record.object_id], alerts
        alerts.append(
            Alert(
                Severity.WARNING,
                NO_SAME_IN_HISTORY,
                f"no prior {verb!r} interaction matches; treating 'the same' as 'a'",
            )
        )
        return (candidates[:1], alerts) if n else empty()

    if determiner == "different":
        used = {r.object_id for r in agent.history if r.verb == verb}
        remaining = [c for c in candidates if c not in used]
        if remaining:
            return remaining[:1], alerts
        alerts.append(
            Alert(
                Severity.WARNING,
                NO_DIFFERENT_LEFT,
                f"every matching object was already used with {verb!r}",
            )
        )
        return empty()

    if determiner == "both":
        if n == 0:
            return empty()
        if n != 2:
            alerts.append(
                Alert(Severity.WARNING, BOTH_COUNT, f"'both' expected exactly 2 objects but {n} match")
            )
        return candidates[:2], alerts

    if determiner == "either":
        if n == 0:
            return empty()
        if n != 2:
            alerts.append(
                Alert(Severity.WARNING, EITHER_COUNT, f"'either' expected exactly 2 objects but {n} match")
            )
        return candidates[:1], alerts

    raise ResolutionError(f"unknown determiner {determiner!r}")


class _Context:
    def __init__(
        self,
        world: WorldState,
        agent: AgentState,
        verb: str,
        qtable: QuantifierTable,
        radius: float | None,
        seed: int,
    ):
        self.world = world
        self.agent = agent
        self.verb = verb
        self.qtable = qtable
        self.radius = radius
        self.seed = seed
        self.alerts: list[Alert] = []


def _location_id(world: WorldState, surface: str | None, ctx: _Context) -> str | None:
    """Map a lowercase location surface form to the declared location id."""
    if surface is None:
        loc = world.location_of_cell(ctx.agent.pose.cell)
        return loc.id if loc else None
    for loc_id in world.locations:
        if loc_id.lower() == surface:
            return loc_id
    ctx.alerts.append(Alert(Severity.ERROR, UNKNOWN_LOCATION, f"unknown location {surface!r}"))
    return None


def _properties_match(obj: WorldObject, properties: tuple[str, ...]) -> bool:
    values = set(obj.properties.values())
    return all(p in values for p in properties)


def _region_cells(world: WorldState, region: RegionRef, ctx: _Context) -> tuple[str | None, frozenset[GridCoord]]:
    loc_id = _location_id(world, region.location, ctx)
    if loc_id is None:
        return None, frozenset()
    loc = world.locations[loc_id]
    entry = ctx.agent.entry_poses.get(loc_id, ctx.agent.pose)
    instance, alerts = regions_mod.select_instance(region.kind, region.modifiers, entry, loc)
    ctx.alerts.extend(alerts)
    if instance is None:
        return None, frozenset()
    rmap = world.region_map(loc_id)
    return loc_id, rmap.cells(region.kind, instance, region.degree)


def _region_goal(world: WorldState, region: RegionRef, ctx: _Context) -> RegionGoal | None:
    loc_id = _location_id(world, region.location, ctx)
    if loc_id is None:
        return None
    loc = world.locations[loc_id]
    entry = ctx.agent.entry_poses.get(loc_id, ctx.agent.pose)
    instance, alerts = regions_mod.select_instance(region.kind, region.modifiers, entry, loc)
    ctx.alerts.extend(alerts)
    if instance is None:
        return None
    return RegionGoal(loc_id, region.kind, instance, region.degree)


def _apply_constraint(
    objs: list[WorldObject], constraint, ctx: _Context
) -> list[WorldObject]:
    world = ctx.world
    if isinstance(constraint, RelationConstraint):
        grounds = _select_objects(constraint.ground, ctx)
        if not grounds:
            return []
        relation = constraint.relation
        if relation in _SECTOR_BY_RELATION:
            sector = _SECTOR_BY_RELATION[relation]
            usable = []
            for g in grounds:
                if g.front is None:
                    ctx.alerts.append(
                        Alert(
                            Severity.WARNING,
                            RELATION_INAPPLICABLE,
                            f"{g.id} has no front; {relation.replace('_', ' ')} does not apply",
                        )
                    )
                else:
                    usable.append(g)
            if not usable:
                return []
            out = []
            for o in objs:
                center = _center_xz(world, o)
                if any(
                    o.id != g.id
                    and relations_mod.sector_of_point(world, g, center, ctx.radius) == sector
                    for g in usable
                ):
                    out.append(o)
            return out
        if relation == REL_ABOVE:
            return [
                o
                for o in objs
                if any(o.id != g.id and relations_mod.is_above(world, o, g, ctx.radius) for g in grounds)
            ]
        if relation == REL_UNDER:
            return [
                o
                for o in objs
                if any(o.id != g.id and relations_mod.is_under(world, o, g, ctx.radius) for g in grounds)
            ]
        if relation == REL_CLOSE:
            return [
                o
                for o in objs
                if any(o.id != g.id and relations_mod.objects_close(world, g, o, ctx.radius) for g in grounds)
            ]
        raise ResolutionError(f"unknown relation {relation!r}")
    if isinstance(constraint, RegionConstraint):
        _, cells = _region_cells(world, constraint.region, ctx)
        if not cells:
            return []
        return [o for o in objs if world.footprint(o) & cells]
    if isinstance(constraint, LocationConstraint):
        loc_id = _location_id(world, constraint.location, ctx)
        if loc_id is None:
            return []
        return [o for o in objs if o.location_id == loc_id]
    if isinstance(constraint, PathConstraint):
        ctx.alerts.append(
            Alert(Severity.ERROR, INVALID_TARGET, "a path relation cannot describe an object")
        )
        return []
    raise ResolutionError(f"unknown constraint {constraint!r}")


def _center_xz(world: WorldState, obj: WorldObject) -> tuple[float, float]:
    lo, hi = world.effective_bbox(obj)
    return ((lo[0] + hi[0]) / 2, (lo[2] + hi[2]) / 2)


def filter_candidates(world: WorldState, agent_id: str, spec: ObjectSpec, **kwargs) -> list[WorldObject]:
    """Candidates matching type, properties, and every constraint, id order."""
    ctx = _Context(
        world,
        world.agents[agent_id],
        kwargs.get("verb", ""),
        kwargs.get("qtable") or QuantifierTable(),
        kwargs.get("radius"),
        kwargs.get("seed", DEFAULT_SEED),
    )
    return _filter_candidates(spec, ctx)


def _filter_candidates(spec: ObjectSpec, ctx: _Context) -> list[WorldObject]:
    if spec.head_type is None:
        raise ResolutionError("cannot filter candidates for a spec with no head type")
    objs = ctx.world.matching_type(spec.head_type)
    objs = [o for o in objs if _properties_match(o, spec.properties)]
    for constraint in spec.constraints:
        if not objs:
            break
        objs = _apply_constraint(objs, constraint, ctx)
    return objs


def _select_objects(spec: ObjectSpec, ctx: _Context) -> list[WorldObject]:
    """Filter candidates, then apply the noun phrase's selector; alerts stream into the context."""
    candidates = _filter_candidates(spec, ctx)
    if spec.owned:
        candidates = [o for o in candidates if o.owner_id == ctx.agent.id]
    ids = [o.id for o in candidates]
    if spec.owned:
        if spec.quantifier:
            selected, alerts = select_with_quantifier(ids, spec.quantifier, ctx.qtable)
        else:
            selected, alerts = list(ids), []
            if not selected:
                alerts = [
                    Alert(Severity.ERROR, EMPTY_SELECTION, f"{ctx.agent.id} owns no matching object")
                ]
    elif spec.quantifier:
        selected, alerts = select_with_quantifier(ids, spec.quantifier, ctx.qtable)
    elif spec.determiner:
        selected, alerts = select_with_determiner(ids, spec.determiner, ctx.agent, ctx.verb)
    else:
        selected, alerts = select_with_determiner(ids, "a", ctx.agent, ctx.verb)
    ctx.alerts.extend(alerts)
    by_id = {o.id: o for o in candidates}
    return [by_id[i] for i in selected]


def _resolve_path(spec: ObjectSpec, constraint: PathConstraint, ctx: _Context) -> PathSpec | None:
    grounds = _select_objects(constraint.ground, ctx)
    if not grounds:
        return None
    ref = grounds[0]
    build = relations_mod.along_path if constraint.kind == relations_mod.ALONG else relations_mod.around_path
    default = DEFAULT_ALONG_COUNT if constraint.kind == relations_mod.ALONG else DEFAULT_AROUND_COUNT
    minimum = (
        relations_mod.MIN_ALONG_COUNT
        if constraint.kind == relations_mod.ALONG
        else relations_mod.MIN_AROUND_COUNT
    )
    for count in dict.fromkeys((default, minimum)):
        try:
            if constraint.kind == relations_mod.ALONG:
                return relations_mod.along_path(ctx.world, ref, count, ctx.seed, near_cell=ctx.agent.pose.cell)
            return relations_mod.around_path(ctx.world, ref, count, ctx.seed)
        except PathError as exc:
            last_error = exc
    ctx.alerts.append(Alert(Severity.ERROR, PATH_BLOCKED, str(last_error)))
    return None


def _navigation_cells(spec: ObjectSpec, ctx: _Context) -> tuple[GridCoord, ...]:
    """Cells satisfying every non-path constraint of a headless spec."""
    world = ctx.world
    cells = set(world.walkable)
    for constraint in spec.constraints:
        if isinstance(constraint, RelationConstraint):
            grounds = _select_objects(constraint.ground, ctx)
            if not grounds:
                return ()
            relation = constraint.relation
            if relation in _SECTOR_BY_RELATION:
                sector = _SECTOR_BY_RELATION[relation]
                usable = [g for g in grounds if g.front is not None]
                for g in grounds:
                    if g.front is None:
                        ctx.alerts.append(
                            Alert(
                                Severity.WARNING,
                                RELATION_INAPPLICABLE,
                                f"{g.id} has no front; {relation.replace('_', ' ')} does not apply",
                            )
                        )
                if not usable:
                    return ()
                cells = {
                    c
                    for c in cells
                    if any(relations_mod.sector_of(world, g, c, ctx.radius) == sector for g in usable)
                }
            elif relation == REL_CLOSE:
                cells = {
                    c for c in cells if any(relations_mod.close_to(world, g, c, ctx.radius) for g in grounds)
                }
            else:
                ctx.alerts.append(
                    Alert(Severity.ERROR, INVALID_TARGET, f"cannot walk to {relation.replace('_', ' ')} somewhere")
                )
                return ()
        elif isinstance(constraint, RegionConstraint):
            _, region_cells = _region_cells(world, constraint.region, ctx)
            cells &= region_cells
        elif isinstance(constraint, LocationConstraint):
            loc_id = _location_id(world, constraint.location, ctx)
            if loc_id is None:
                return ()
            cells &= set(world.locations[loc_id].cells())
        elif isinstance(constraint, PathConstraint):
            continue
    return tuple(sorted(cells))


def resolve(
    world: WorldState,
    agent_id: str,
    instruction: Instruction,
    *,
    action: ActionDef | None = None,
    qtable: QuantifierTable | None = None,
    seed: int = DEFAULT_SEED,
    radius: float | None = None,
) -> Resolution:
    """Resolve an instruction's referring expressions against the world.

    Returns targets (object ids, cells, or a path), an optional destination for
    placing verbs, and every alert raised along the way. The targets are empty
    exactly when an Error-severity alert is present.
    """
    if agent_id not in world.agents:
        raise ResolutionError(f"unknown agent {agent_id!r}")
    agent = world.agents[agent_id]
    ctx = _Context(world, agent, instruction.verb, qtable or QuantifierTable(), radius, seed)
    spec = instruction.spec

    destination: str | None = None
    effect = action.effect if action else None
    if effect == "place":
        goal_indices = [
            i
            for i, c in enumerate(spec.constraints)
            if isinstance(c, RelationConstraint) and c.goal_marker
        ]
        if goal_indices:
            goal = spec.constraints[goal_indices[-1]]
            rest = tuple(c for i, c in enumerate(spec.constraints) if i != goal_indices[-1])
            spec = replace(spec, constraints=rest)
            dest_objects = _select_objects(goal.ground, ctx)
            if dest_objects:
                destination = dest_objects[0].id
            else:
                return _finish(Resolution(destination=None), ctx)

    if spec.head_type is not None:
        selected = _select_objects(spec, ctx)
        return _finish(
            Resolution(objects=tuple(o.id for o in selected), destination=destination), ctx
        )

    if spec.region is not None:
        goal = _region_goal(world, spec.region, ctx)
        if goal is None:
            return _finish(Resolution(), ctx)
        rmap = world.region_map(goal.location_id)
        if goal.degree is not None:
            cells = rmap.cells(goal.kind, goal.instance, goal.degree)
        else:
            cells = rmap.cells(goal.kind, goal.instance, regions_mod.STRICT)
        if not cells:
            ctx.alerts.append(
                Alert(
                    Severity.ERROR,
                    REGION_UNREACHABLE,
                    f"the {goal.degree or ''} {goal.kind} {goal.instance} region has no cells".replace("  ", " "),
                )
            )
            return _finish(Resolution(), ctx)
        return _finish(Resolution(cells=tuple(sorted(cells)), region_goal=goal), ctx)

    path_constraints = [c for c in spec.constraints if isinstance(c, PathConstraint)]
    if path_constraints:
        path = _resolve_path(spec, path_constraints[0], ctx)
        return _finish(Resolution(path=path), ctx)

    region_constraints = [c for c in spec.constraints if isinstance(c, RegionConstraint)]
    if len(region_constraints) == 1 and len(spec.constraints) == 1:
        # A single region constraint on a headless spec is region navigation.
        region_spec = replace(spec, region=region_constraints[0].region, constraints=())
        return resolve(
            world,
            agent_id,
            Instruction(instruction.verb, region_spec, instruction.raw_text),
            action=action,
            qtable=qtable,
            seed=seed,
            radius=radius,
        )

    cells = _navigation_cells(spec, ctx)
    if not cells and not any(w.severity == Severity.ERROR for w in ctx.alerts):
        ctx.alerts.append(
            Alert(Severity.ERROR, REGION_UNREACHABLE, "no cell satisfies the requested constraints")
        )
    return _finish(Resolution(cells=cells), ctx)


def _finish(resolution: Resolution, ctx: _Context) -> Resolution:
    alerts = list(ctx.alerts)
    has_targets = bool(resolution.objects or resolution.cells or resolution.path)
    if not has_targets and not any(a.severity == Severity.ERROR for a in alerts):
        alerts.append(Alert(Severity.ERROR, EMPTY_SELECTION, "nothing to act on"))
    if has_targets and any(a.severity == Severity.ERROR for a in alerts):
        # An error elsewhere (e.g. unresolvable destination) voids the targets.
        resolution = replace(resolution, objects=(), cells=(), path=None, region_goal=None)
    return replace(resolution, warnings=tuple(alerts))
