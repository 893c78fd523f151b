"""World model: locations, a type hierarchy, objects with bboxes, agents, history."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core import GridCoord, HEADINGS, LoadError, ResolutionError

ROOT_TYPE = "entity"
DEFAULT_CLOSE_RADIUS = 2.0

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class Location:
    """An axis-aligned rectangular room; cell bounds are half-open."""

    id: str
    start_x: int
    end_x: int
    start_z: int
    end_z: int
    g_width_override: int | None = None
    g_length_override: int | None = None

    @property
    def width(self) -> int:
        return self.end_x - self.start_x

    @property
    def length(self) -> int:
        return self.end_z - self.start_z

    def contains(self, cell: GridCoord) -> bool:
        return self.start_x <= cell.x < self.end_x and self.start_z <= cell.z < self.end_z

    def cells(self) -> list[GridCoord]:
        return [
            GridCoord(x, z)
            for x in range(self.start_x, self.end_x)
            for z in range(self.start_z, self.end_z)
        ]


@dataclass(frozen=True)
class Pose:
    cell: GridCoord
    heading: str


@dataclass(frozen=True)
class InteractionRecord:
    agent_id: str
    verb: str
    object_id: str
    tick: int


@dataclass
class WorldObject:
    id: str
    type: str
    properties: dict[str, str]
    bbox_min: Vec3
    bbox_max: Vec3
    location_id: str
    front: tuple[float, float] | None = None
    owner_id: str | None = None
    carried_by: str | None = None
    consumed: bool = False

    @property
    def center(self) -> Vec3:
        return tuple((a + b) / 2 for a, b in zip(self.bbox_min, self.bbox_max))

    @property
    def height(self) -> float:
        return self.bbox_max[1] - self.bbox_min[1]


@dataclass
class AgentState:
    id: str
    role: str
    pose: Pose
    entry_poses: dict[str, Pose] = field(default_factory=dict)
    inventory: list[str] = field(default_factory=list)
    history: list[InteractionRecord] = field(default_factory=list)


class TypeHierarchy:
    """Object types arranged in a rooted tree under ``entity``."""

    def __init__(self, parents: dict[str, str | None]):
        self.parents = dict(parents)
        self.parents.setdefault(ROOT_TYPE, None)
        self._validate()

    def _validate(self) -> None:
        for name, parent in self.parents.items():
            if name == ROOT_TYPE:
                if parent is not None:
                    raise LoadError(f"type {ROOT_TYPE!r} must not declare a parent")
                continue
            if parent is None:
                raise LoadError(f"type {name!r} has no parent")
            if parent not in self.parents:
                raise LoadError(f"type {name!r} has undeclared parent {parent!r}")
        for name in self.parents:
            seen = set()
            cur: str | None = name
            while cur is not None:
                if cur in seen:
                    raise LoadError(f"type hierarchy has a cycle through {cur!r}")
                seen.add(cur)
                cur = self.parents[cur]

    def __contains__(self, name: str) -> bool:
        return name in self.parents

    def names(self) -> list[str]:
        return list(self.parents)

    def ancestry(self, name: str) -> list[str]:
        """The chain from ``name`` up to and including the root."""
        if name not in self.parents:
            raise ResolutionError(f"unknown object type {name!r}")
        chain = []
        cur: str | None = name
        while cur is not None:
            chain.append(cur)
            cur = self.parents[cur]
        return chain

    def is_subtype(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestry(name)


def _footprint(bbox_min: Vec3, bbox_max: Vec3) -> frozenset[GridCoord]:
    """Cells whose point lies inside the closed x-z projection of the bbox."""
    import math

    x0, z0 = bbox_min[0], bbox_min[2]
    x1, z1 = bbox_max[0], bbox_max[2]
    return frozenset(
        GridCoord(x, z)
        for x in range(math.ceil(x0), math.floor(x1) + 1)
        for z in range(math.ceil(z0), math.floor(z1) + 1)
    )


class WorldState:
    """Mutable world snapshot: static declarations plus dynamic agent/object state."""

    def __init__(
        self,
        types: TypeHierarchy,
        locations: list[Location],
        objects: list[WorldObject],
        agents: list[AgentState],
        close_to_radius: float = DEFAULT_CLOSE_RADIUS,
    ):
        self.types = types
        self.locations: dict[str, Location] = {loc.id: loc for loc in locations}
        self.objects: dict[str, WorldObject] = {obj.id: obj for obj in objects}
        self.agents: dict[str, AgentState] = {a.id: a for a in agents}
        self.close_to_radius = close_to_radius
        self._walkable: frozenset[GridCoord] | None = None
        self._region_maps: dict[str, object] = {}
        self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self) -> None:
        locs = list(self.locations.values())
        for loc in locs:
            if loc.start_x >= loc.end_x or loc.start_z >= loc.end_z:
                raise LoadError(f"location {loc.id!r} has empty bounds")
        for i, a in enumerate(locs):
            for b in locs[i + 1 :]:
                if (
                    a.start_x < b.end_x
                    and b.start_x < a.end_x
                    and a.start_z < b.end_z
                    and b.start_z < a.end_z
                ):
                    raise LoadError(f"locations {a.id!r} and {b.id!r} overlap")
        for obj in self.objects.values():
            if obj.type not in self.types:
                raise LoadError(f"object {obj.id!r} has undeclared type {obj.type!r}")
            if obj.location_id not in self.locations:
                raise LoadError(f"object {obj.id!r} placed in unknown location {obj.location_id!r}")
            if any(a > b for a, b in zip(obj.bbox_min, obj.bbox_max)):
                raise LoadError(f"object {obj.id!r} has inverted bbox")
        for agent in self.agents.values():
            if agent.pose.heading not in HEADINGS:
                raise LoadError(f"agent {agent.id!r} has invalid heading {agent.pose.heading!r}")
            loc = self.location_of_cell(agent.pose.cell)
            if loc is None:
                raise LoadError(f"agent {agent.id!r} starts outside every location")
            agent.entry_poses.setdefault(loc.id, agent.pose)

    # -- geometry --------------------------------------------------------

    def location_of_cell(self, cell: GridCoord) -> Location | None:
        for loc in self.locations.values():
            if loc.contains(cell):
                return loc
        return None

    @property
    def walkable(self) -> frozenset[GridCoord]:
        if self._walkable is None:
            cells: set[GridCoord] = set()
            for loc in self.locations.values():
                cells.update(loc.cells())
            self._walkable = frozenset(cells)
        return self._walkable

    def effective_bbox(self, obj: WorldObject) -> tuple[Vec3, Vec3]:
        """The bbox used for geometry; a carried object tracks its carrier."""
        if obj.carried_by is not None and obj.carried_by in self.agents:
            cell = self.agents[obj.carried_by].pose.cell
            cx = (obj.bbox_min[0] + obj.bbox_max[0]) / 2
            cz = (obj.bbox_min[2] + obj.bbox_max[2]) / 2
            dx, dz = cell.x - cx, cell.z - cz
            lo = (obj.bbox_min[0] + dx, obj.bbox_min[1], obj.bbox_min[2] + dz)
            hi = (obj.bbox_max[0] + dx, obj.bbox_max[1], obj.bbox_max[2] + dz)
            return lo, hi
        return obj.bbox_min, obj.bbox_max

    def footprint(self, obj: WorldObject) -> frozenset[GridCoord]:
        lo, hi = self.effective_bbox(obj)
        return _footprint(lo, hi)

    def blocked_cells(self, ignore_agent: str | None = None) -> set[GridCoord]:
        """Cells occupied by grounded object footprints and agents."""
        blocked: set[GridCoord] = set()
        for obj in self.objects.values():
            if obj.consumed or obj.carried_by is not None:
                continue
            blocked.update(_footprint(obj.bbox_min, obj.bbox_max))
        for agent in self.agents.values():
            if agent.id != ignore_agent:
                blocked.add(agent.pose.cell)
        return blocked

    # -- queries ---------------------------------------------------------

    def matching_type(self, type_name: str) -> list[WorldObject]:
        """Non-consumed objects whose type is ``type_name`` or a descendant, id order."""
        if type_name not in self.types:
            raise ResolutionError(f"unknown object type {type_name!r}")
        out = [
            obj
            for obj in self.objects.values()
            if not obj.consumed and self.types.is_subtype(obj.type, type_name)
        ]
        return sorted(out, key=lambda o: o.id)

    def record_interaction(self, agent_id: str, verb: str, object_id: str, tick: int) -> InteractionRecord:
        rec = InteractionRecord(agent_id, verb, object_id, tick)
        self.agents[agent_id].history.append(rec)
        return rec

    def region_map(self, location_id: str):
        from . import regions

        if location_id not in self._region_maps:
            loc = self.locations.get(location_id)
            if loc is None:
                raise ResolutionError(f"unknown location {location_id!r}")
            self._region_maps[location_id] = regions.build_region_map(loc)
        return self._region_maps[location_id]

    def clone(self) -> "WorldState":
        return copy.deepcopy(self)

    # -- serialization ---------------------------------------------------

    def to_document(self, dynamic: bool = False) -> dict:
        doc: dict = {}
        if self.close_to_radius != DEFAULT_CLOSE_RADIUS:
            doc["closeToRadius"] = self.close_to_radius
        types = [
            {"name": name, **({"parent": parent} if parent not in (None, ROOT_TYPE) else {})}
            for name, parent in self.types.parents.items()
            if name != ROOT_TYPE
        ]
        doc["types"] = types
        doc["locations"] = [
            {
                "id": loc.id,
                "startX": loc.start_x,
                "endX": loc.end_x,
                "startZ": loc.start_z,
                "endZ": loc.end_z,
                **({"gWidth": loc.g_width_override} if loc.g_width_override is not None else {}),
                **({"gLength": loc.g_length_override} if loc.g_length_override is not None else {}),
            }
            for loc in self.locations.values()
        ]
        doc["objects"] = []
        for obj in self.objects.values():
            entry: dict = {
                "id": obj.id,
                "type": obj.type,
                "properties": dict(obj.properties),
                "bboxMin": list(obj.bbox_min),
                "bboxMax": list(obj.bbox_max),
                "location": obj.location_id,
            }
            if obj.front is not None:
                entry["front"] = list(obj.front)
            if obj.owner_id is not None:
                entry["owner"] = obj.owner_id
            if dynamic:
                entry["carriedBy"] = obj.carried_by
                entry["consumed"] = obj.consumed
                lo, hi = self.effective_bbox(obj)
                entry["effectiveBboxMin"] = list(lo)
                entry["effectiveBboxMax"] = list(hi)
            doc["objects"].append(entry)
        doc["agents"] = []
        for agent in self.agents.values():
            entry = {
                "id": agent.id,
                "role": agent.role,
                "cell": [agent.pose.cell.x, agent.pose.cell.z],
                "heading": agent.pose.heading,
            }
            if dynamic:
                entry["inventory"] = list(agent.inventory)
                entry["entryPoses"] = {
                    loc: {"cell": [p.cell.x, p.cell.z], "heading": p.heading}
                    for loc, p in agent.entry_poses.items()
                }
                entry["history"] = [
                    {"verb": r.verb, "object": r.object_id, "tick": r.tick}
                    for r in agent.history
                ]
            doc["agents"].append(entry)
        return doc


def dump_world(world: WorldState) -> str:
    return yaml.safe_dump(world.to_document(), sort_keys=False, default_flow_style=None)


# -- loading ---------------------------------------------------------------


def _require_keys(entry: dict, allowed: set[str], required: set[str], what: str) -> None:
    if not isinstance(entry, dict):
        raise LoadError(f"{what} must be a mapping, got {type(entry).__name__}")
    unknown = set(entry) - allowed
    if unknown:
        raise LoadError(f"{what} has unknown keys: {sorted(unknown)}")
    missing = required - set(entry)
    if missing:
        raise LoadError(f"{what} is missing required keys: {sorted(missing)}")


def _vec3(value, what: str) -> Vec3:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise LoadError(f"{what} must be a 3-component list")
    return tuple(float(v) for v in value)


def load_world(text: str) -> WorldState:
    """Parse and validate a world document (YAML; JSON is accepted as a subset)."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise LoadError(f"world document is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise LoadError("world document must be a mapping")
    _require_keys(
        doc,
        allowed={"types", "locations", "objects", "agents", "closeToRadius"},
        required={"locations"},
        what="world document",
    )

    radius = float(doc.get("closeToRadius", DEFAULT_CLOSE_RADIUS))
    if radius <= 0:
        raise LoadError("closeToRadius must be positive")

    parents: dict[str, str | None] = {}
    for entry in doc.get("types", []) or []:
        _require_keys(entry, {"name", "parent"}, {"name"}, "type entry")
        name = str(entry["name"])
        if name in parents:
            raise LoadError(f"type {name!r} declared twice")
        parents[name] = str(entry.get("parent", ROOT_TYPE))
    if ROOT_TYPE in parents:
        parents[ROOT_TYPE] = None
    types = TypeHierarchy(parents)

    locations: list[Location] = []
    seen_loc: set[str] = set()
    for entry in doc.get("locations", []) or []:
        _require_keys(
            entry,
            {"id", "startX", "endX", "startZ", "endZ", "gWidth", "gLength"},
            {"id", "startX", "endX", "startZ", "endZ"},
            "location entry",
        )
        loc = Location(
            id=str(entry["id"]),
            start_x=int(entry["startX"]),
            end_x=int(entry["endX"]),
            start_z=int(entry["startZ"]),
            end_z=int(entry["endZ"]),
            g_width_override=int(entry["gWidth"]) if "gWidth" in entry else None,
            g_length_override=int(entry["gLength"]) if "gLength" in entry else None,
        )
        if loc.id in seen_loc:
            raise LoadError(f"location {loc.id!r} declared twice")
        seen_loc.add(loc.id)
        locations.append(loc)

    objects: list[WorldObject] = []
    seen_obj: set[str] = set()
    for entry in doc.get("objects", []) or []:
        _require_keys(
            entry,
            {"id", "type", "properties", "bboxMin", "bboxMax", "front", "location", "owner"},
            {"id", "type", "bboxMin", "bboxMax", "location"},
            "object entry",
        )
        oid = str(entry["id"])
        if oid in seen_obj:
            raise LoadError(f"object {oid!r} declared twice")
        seen_obj.add(oid)
        front = entry.get("front")
        if front is not None:
            if not isinstance(front, (list, tuple)) or len(front) != 2:
                raise LoadError(f"object {oid!r} front must be a 2-component list")
            front = (float(front[0]), float(front[1]))
        props = entry.get("properties", {}) or {}
        if not isinstance(props, dict):
            raise LoadError(f"object {oid!r} properties must be a mapping")
        objects.append(
            WorldObject(
                id=oid,
                type=str(entry["type"]),
                properties={str(k): str(v) for k, v in props.items()},
                bbox_min=_vec3(entry["bboxMin"], f"object {oid!r} bboxMin"),
                bbox_max=_vec3(entry["bboxMax"], f"object {oid!r} bboxMax"),
                location_id=str(entry["location"]),
                front=front,
                owner_id=str(entry["owner"]) if "owner" in entry else None,
            )
        )

    agents: list[AgentState] = []
    seen_agent: set[str] = set()
    for entry in doc.get("agents", []) or []:
        _require_keys(entry, {"id", "role", "cell", "heading"}, {"id", "role", "cell", "heading"}, "agent entry")
        aid = str(entry["id"])
        if aid in seen_agent:
            raise LoadError(f"agent {aid!r} declared twice")
        seen_agent.add(aid)
        cell = entry["cell"]
        if not isinstance(cell, (list, tuple)) or len(cell) != 2:
            raise LoadError(f"agent {aid!r} cell must be a 2-component list")
        agents.append(
            AgentState(
                id=aid,
                role=str(entry["role"]),
                pose=Pose(GridCoord(int(cell[0]), int(cell[1])), str(entry["heading"])),
            )
        )

    return WorldState(types, locations, objects, agents, close_to_radius=radius)


def load_world_file(path: str | Path) -> WorldState:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise LoadError(f"cannot read world file {p}: {exc}") from exc
    return load_world(text)
