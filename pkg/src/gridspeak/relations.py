"""Object-anchored relations: proximity, facing sectors, above/under, paths.

Geometry convention: the integer cell (x, z) is the point (x.0, z.0) of the
continuous frame object bboxes live in. Every relation here implies the
close-to test against the reference object's x-z bbox.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .core import DomainError, GridCoord, PathError
from .world import WorldObject, WorldState

FRONT = "front"
BACK = "back"
LEFT = "left"
RIGHT = "right"

ALONG = "along"
AROUND = "around"

MIN_ALONG_COUNT = 2
MIN_AROUND_COUNT = 4


@dataclass(frozen=True)
class PathSpec:
    """An ordered set of waypoint cells tied to a reference object."""

    kind: str
    reference_id: str
    waypoints: tuple[GridCoord, ...]
    seed: int

    def to_payload(self) -> dict:
        return {
            "kind": self.kind,
            "reference": self.reference_id,
            "waypoints": [[c.x, c.z] for c in self.waypoints],
            "seed": self.seed,
        }


def bbox_distance_xz(lo, hi, point: tuple[float, float]) -> float:
    """Euclidean distance from a point to the closed x-z rectangle of a bbox."""
    px, pz = point
    dx = max(lo[0] - px, 0.0, px - hi[0])
    dz = max(lo[2] - pz, 0.0, pz - hi[2])
    return (dx * dx + dz * dz) ** 0.5


def _radius(world: WorldState, radius: float | None) -> float:
    return world.close_to_radius if radius is None else radius


def close_to_point(world: WorldState, ref: WorldObject, point: tuple[float, float], radius: float | None = None) -> bool:
    lo, hi = world.effective_bbox(ref)
    return bbox_distance_xz(lo, hi, point) <= _radius(world, radius)


def close_to(world: WorldState, ref: WorldObject, cell: GridCoord, radius: float | None = None) -> bool:
    """True when the cell point is within ``radius`` of the ref's x-z bbox (closed)."""
    return close_to_point(world, ref, (float(cell.x), float(cell.z)), radius)


def objects_close(world: WorldState, ref: WorldObject, other: WorldObject, radius: float | None = None) -> bool:
    """Object-to-object proximity: the other object's bbox center vs the ref bbox."""
    cx, _, cz = _effective_center(world, other)
    return close_to_point(world, ref, (cx, cz), radius)


def _effective_center(world: WorldState, obj: WorldObject):
    lo, hi = world.effective_bbox(obj)
    return tuple((a + b) / 2 for a, b in zip(lo, hi))


def sector_of_point(
    world: WorldState, ref: WorldObject, point: tuple[float, float], radius: float | None = None
) -> str | None:
    """Which 90-degree sector around the ref's front the point falls in.

    Sectors are measured from the bbox center; left/right follow the object's
    own facing (stage convention). Points outside the close-to radius get None.
    Boundary ties resolve toward front, then left.
    """
    if ref.front is None:
        raise DomainError(f"object {ref.id!r} has no front; sector relations are inapplicable")
    if not close_to_point(world, ref, point, radius):
        return None
    fx, fz = ref.front
    norm = (fx * fx + fz * fz) ** 0.5
    if norm == 0:
        raise DomainError(f"object {ref.id!r} has a zero-length front vector")
    fx, fz = fx / norm, fz / norm
    lx, lz = fz, -fx  # the object's own left hand
    cx, _, cz = _effective_center(world, ref)
    vx, vz = point[0] - cx, point[1] - cz
    dot_f = vx * fx + vz * fz
    dot_l = vx * lx + vz * lz
    if dot_f >= abs(dot_l):
        return FRONT
    if dot_l >= abs(dot_f):
        return LEFT
    if -dot_l >= abs(dot_f):
        return RIGHT
    return BACK


def sector_of(world: WorldState, ref: WorldObject, cell: GridCoord, radius: float | None = None) -> str | None:
    return sector_of_point(world, ref, (float(cell.x), float(cell.z)), radius)


def is_above(world: WorldState, a: WorldObject, b: WorldObject, radius: float | None = None) -> bool:
    """a sits above b: higher bbox center, x-z centers within the close radius."""
    ca = _effective_center(world, a)
    cb = _effective_center(world, b)
    if ca[1] <= cb[1]:
        return False
    dx, dz = ca[0] - cb[0], ca[2] - cb[2]
    return (dx * dx + dz * dz) ** 0.5 <= _radius(world, radius)


def is_under(world: WorldState, a: WorldObject, b: WorldObject, radius: float | None = None) -> bool:
    return is_above(world, b, a, radius)


def close_band(world: WorldState, ref: WorldObject, radius: float | None = None) -> list[GridCoord]:
    """Walkable-location cells close to the ref but strictly outside its bbox, sorted."""
    lo, hi = world.effective_bbox(ref)
    r = _radius(world, radius)
    out = []
    for cell in world.walkable:
        d = bbox_distance_xz(lo, hi, (float(cell.x), float(cell.z)))
        if 0 < d <= r:
            out.append(cell)
    return sorted(out)


def _long_axis(lo, hi) -> str:
    """'x' or 'z', whichever bbox extent is longer (ties go to x)."""
    return "x" if (hi[0] - lo[0]) >= (hi[2] - lo[2]) else "z"


def _band_sides(world: WorldState, ref: WorldObject, radius: float | None):
    """Split the close band into the four open half-plane sides of the bbox."""
    lo, hi = world.effective_bbox(ref)
    band = close_band(world, ref, radius)
    sides = {
        "N": [c for c in band if c.z < lo[2]],
        "S": [c for c in band if c.z > hi[2]],
        "W": [c for c in band if c.x < lo[0]],
        "E": [c for c in band if c.x > hi[0]],
    }
    return lo, hi, sides


def along_path(
    world: WorldState,
    ref: WorldObject,
    count: int,
    seed: int,
    near_cell: GridCoord | None = None,
) -> PathSpec:
    """Waypoints on one lateral side of the ref, monotone along its long axis.

    The side is the one nearest ``near_cell`` (usually the agent) or the
    first non-empty lateral side otherwise.
    """
    if count < MIN_ALONG_COUNT:
        raise PathError(f"along needs at least {MIN_ALONG_COUNT} waypoints, got {count}")
    lo, hi, sides = _band_sides(world, ref, None)
    axis = _long_axis(lo, hi)
    lateral = ("N", "S") if axis == "x" else ("W", "E")
    candidates = {s: sides[s] for s in lateral if sides[s]}
    if not candidates:
        raise PathError(f"no free cells alongside {ref.id!r}")

    def side_key(side: str) -> tuple:
        cells = candidates[side]
        if near_cell is not None:
            best = min(abs(c.x - near_cell.x) + abs(c.z - near_cell.z) for c in cells)
            return (best, side)
        return (0, side)

    side = min(candidates, key=side_key)
    pool = candidates[side]
    k = min(count, len(pool))
    if k < MIN_ALONG_COUNT:
        raise PathError(f"only {k} free cells alongside {ref.id!r}; need {MIN_ALONG_COUNT}")
    rng = random.Random(seed)
    chosen = rng.sample(pool, k)
    chosen.sort(key=(lambda c: (c.x, c.z)) if axis == "x" else (lambda c: (c.z, c.x)))
    return PathSpec(ALONG, ref.id, tuple(chosen), seed)


def around_path(world: WorldState, ref: WorldObject, count: int, seed: int) -> PathSpec:
    """A counterclockwise loop of waypoints drawn from all four sides of the ref."""
    if count < MIN_AROUND_COUNT:
        raise PathError(f"around needs at least {MIN_AROUND_COUNT} waypoints, got {count}")
    lo, hi, sides = _band_sides(world, ref, None)
    order = ("N", "S", "W", "E")
    if any(not sides[s] for s in order):
        empty = [s for s in order if not sides[s]]
        raise PathError(f"no free cells on side(s) {empty} of {ref.id!r}")
    base, rem = divmod(count, 4)
    quota = {s: base + (1 if i < rem else 0) for i, s in enumerate(order)}
    rng = random.Random(seed)
    chosen: list[GridCoord] = []
    used: set[GridCoord] = set()
    for s in order:
        pool = [c for c in sides[s] if c not in used]  # diagonal cells sit on two sides
        picked = rng.sample(pool, min(quota[s], len(pool)))
        chosen.extend(picked)
        used.update(picked)
    if len(chosen) < MIN_AROUND_COUNT:
        raise PathError(f"only {len(chosen)} free cells around {ref.id!r}")
    cx = (lo[0] + hi[0]) / 2
    cz = (lo[2] + hi[2]) / 2
    # Counterclockwise on screen (z grows south): ascending atan2 of the
    # flipped z offset. Start from the first sampled cell to keep seeds stable.
    import math

    def angle(c: GridCoord) -> float:
        return math.atan2(-(c.z - cz), c.x - cx)

    start = chosen[0]
    a0 = angle(start)
    chosen.sort(key=lambda c: ((angle(c) - a0) % (2 * math.pi), c.x, c.z))
    return PathSpec(AROUND, ref.id, tuple(chosen), seed)
