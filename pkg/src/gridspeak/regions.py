"""Fuzzy spatial regions of a room: corners, ends, sides, middle, graded by degree.

Each location is partitioned into wall-depth bands ``gWidth`` (along x) and
``gLength`` (along z). Region kinds have fixed instances -- corners NW/NE/SW/SE,
ends N/S, sides W/E, middle C -- and every instance is split into three degree
bands (strict < proximate < near) by Chebyshev distance to the instance anchor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    AMBIGUOUS_REGION,
    Alert,
    DomainError,
    EMPTY_SELECTION,
    GridCoord,
    Severity,
    heading_vector,
)
from .world import Location, Pose

CORNER = "corner"
END = "end"
MIDDLE = "middle"
SIDE = "side"
REGION_KINDS = (CORNER, END, MIDDLE, SIDE)

STRICT = "strict"
PROXIMATE = "proximate"
NEAR = "near"
DEGREES = (STRICT, PROXIMATE, NEAR)

INSTANCE_LABELS: dict[str, tuple[str, ...]] = {
    CORNER: ("NW", "NE", "SW", "SE"),
    END: ("N", "S"),
    MIDDLE: ("C",),
    SIDE: ("W", "E"),
}

MOD_LEFT = "left"
MOD_RIGHT = "right"
MOD_NEAR = "near"
MOD_FAR = "far"
MODIFIERS = (MOD_LEFT, MOD_RIGHT, MOD_NEAR, MOD_FAR)


def default_grid_depth(b: int) -> int:
    """Wall-band depth for a room dimension of ``b`` cells: ceil(b/4), min 1.

    The depth normally satisfies 2*G <= b; the single-cell room (b == 1) is
    clamped to G = 1 even though that bound cannot hold there.
    """
    if b < 1:
        raise DomainError(f"room dimension must be positive, got {b}")
    return max(1, math.ceil(b / 4))


def _check_depth(g: int, b: int, axis: str, where: str) -> None:
    if not (0 < g and (2 * g <= b or (b == 1 and g == 1))):
        raise DomainError(f"{axis}={g} out of range for dimension {b} in {where}")


def grid_depths(loc: Location) -> tuple[int, int]:
    """(gWidth, gLength) for a location, honoring per-location overrides."""
    gw = loc.g_width_override if loc.g_width_override is not None else default_grid_depth(loc.width)
    gl = loc.g_length_override if loc.g_length_override is not None else default_grid_depth(loc.length)
    _check_depth(gw, loc.width, "gWidth", f"location {loc.id!r}")
    _check_depth(gl, loc.length, "gLength", f"location {loc.id!r}")
    return gw, gl


def _x_bands(loc: Location, gw: int) -> tuple[range, range]:
    return range(loc.start_x, loc.start_x + gw), range(loc.end_x - gw, loc.end_x)


def _z_bands(loc: Location, gl: int) -> tuple[range, range]:
    return range(loc.start_z, loc.start_z + gl), range(loc.end_z - gl, loc.end_z)


def corner_nodes(loc: Location, gw: int, gl: int) -> dict[str, frozenset[GridCoord]]:
    """Cells of the four corner instances (cartesian products of wall bands)."""
    _check_depth(gw, loc.width, "gWidth", f"location {loc.id!r}")
    _check_depth(gl, loc.length, "gLength", f"location {loc.id!r}")
    west, east = _x_bands(loc, gw)
    north, south = _z_bands(loc, gl)
    return {
        "NW": frozenset(GridCoord(x, z) for x in west for z in north),
        "NE": frozenset(GridCoord(x, z) for x in east for z in north),
        "SW": frozenset(GridCoord(x, z) for x in west for z in south),
        "SE": frozenset(GridCoord(x, z) for x in east for z in south),
    }


def end_nodes(loc: Location, gw: int, gl: int) -> dict[str, frozenset[GridCoord]]:
    """Full rows along the north/south walls, minus the corner cells."""
    corners = corner_nodes(loc, gw, gl)
    taken = frozenset().union(*corners.values())
    north, south = _z_bands(loc, gl)
    xs = range(loc.start_x, loc.end_x)
    return {
        "N": frozenset(GridCoord(x, z) for x in xs for z in north) - taken,
        "S": frozenset(GridCoord(x, z) for x in xs for z in south) - taken,
    }


def side_nodes(loc: Location, gw: int, gl: int) -> dict[str, frozenset[GridCoord]]:
    """Full columns along the west/east walls, minus the corner cells."""
    corners = corner_nodes(loc, gw, gl)
    taken = frozenset().union(*corners.values())
    west, east = _x_bands(loc, gw)
    zs = range(loc.start_z, loc.end_z)
    return {
        "W": frozenset(GridCoord(x, z) for x in west for z in zs) - taken,
        "E": frozenset(GridCoord(x, z) for x in east for z in zs) - taken,
    }


def middle_nodes(loc: Location, gw: int, gl: int) -> dict[str, frozenset[GridCoord]]:
    """Central 2gw-by-2gl block, shifted toward the start on odd remainders."""
    x0 = loc.start_x + (loc.width - 2 * gw) // 2
    z0 = loc.start_z + (loc.length - 2 * gl) // 2
    cells = frozenset(
        GridCoord(x, z)
        for x in range(max(x0, loc.start_x), min(x0 + 2 * gw, loc.end_x))
        for z in range(max(z0, loc.start_z), min(z0 + 2 * gl, loc.end_z))
    )
    return {"C": cells}


def anchor_point(loc: Location, kind: str, instance: str) -> tuple[float, float]:
    """The anchor a region instance is ranked against (may be fractional)."""
    lx, hx = loc.start_x, loc.end_x - 1
    lz, hz = loc.start_z, loc.end_z - 1
    mx, mz = (lx + hx) / 2, (lz + hz) / 2
    table: dict[tuple[str, str], tuple[float, float]] = {
        (CORNER, "NW"): (lx, lz),
        (CORNER, "NE"): (hx, lz),
        (CORNER, "SW"): (lx, hz),
        (CORNER, "SE"): (hx, hz),
        (END, "N"): (mx, lz),
        (END, "S"): (mx, hz),
        (SIDE, "W"): (lx, mz),
        (SIDE, "E"): (hx, mz),
        (MIDDLE, "C"): (mx, mz),
    }
    try:
        return table[(kind, instance)]
    except KeyError:
        raise DomainError(f"unknown region instance {kind}/{instance}") from None


def degree_partition(
    cells: frozenset[GridCoord] | set[GridCoord], anchor: tuple[float, float]
) -> dict[str, frozenset[GridCoord]]:
    """Split cells into strict/proximate/near bands by Chebyshev rank to anchor.

    Cells are ranked by (chebyshev distance, x, z); ranks are cut into three
    contiguous runs as equal as possible, remainders going to the nearer band.
    Fewer than three cells fill strict, then proximate, then near.
    """
    ax, az = anchor
    ranked = sorted(cells, key=lambda c: (max(abs(c.x - ax), abs(c.z - az)), c.x, c.z))
    n = len(ranked)
    base, rem = divmod(n, 3)
    sizes = [base + (1 if rem >= 1 else 0), base + (1 if rem >= 2 else 0), base]
    if n < 3:
        sizes = [min(1, n), min(1, max(0, n - 1)), 0]
    out: dict[str, frozenset[GridCoord]] = {}
    start = 0
    for degree, size in zip(DEGREES, sizes):
        out[degree] = frozenset(ranked[start : start + size])
        start += size
    return out


@dataclass(frozen=True)
class RegionMap:
    """All (kind, instance, degree) cell sets for one location."""

    location_id: str
    g_width: int
    g_length: int
    entries: dict[tuple[str, str, str], frozenset[GridCoord]]

    def cells(self, kind: str, instance: str, degree: str | None = None) -> frozenset[GridCoord]:
        if degree is not None:
            return self.entries.get((kind, instance, degree), frozenset())
        return frozenset().union(
            *(self.entries.get((kind, instance, d), frozenset()) for d in DEGREES)
        )

    def rows(self):
        """Deterministic iteration: kind, instance, degree order."""
        for kind in REGION_KINDS:
            for instance in INSTANCE_LABELS[kind]:
                for degree in DEGREES:
                    yield kind, instance, degree, self.entries.get((kind, instance, degree), frozenset())


def build_region_map(loc: Location) -> RegionMap:
    gw, gl = grid_depths(loc)
    by_kind: dict[str, dict[str, frozenset[GridCoord]]] = {
        CORNER: corner_nodes(loc, gw, gl),
        END: end_nodes(loc, gw, gl),
        MIDDLE: middle_nodes(loc, gw, gl),
        SIDE: side_nodes(loc, gw, gl),
    }
    # Degenerate one-cell-wide rooms make wall bands coincide; keep instances
    # of a kind pairwise disjoint by letting the first label claim each cell.
    for kind in (CORNER, END, SIDE):
        seen: set[GridCoord] = set()
        for label in INSTANCE_LABELS[kind]:
            cells = by_kind[kind][label] - seen
            by_kind[kind][label] = cells
            seen |= cells
    entries: dict[tuple[str, str, str], frozenset[GridCoord]] = {}
    for kind, instances in by_kind.items():
        for label, cells in instances.items():
            bands = degree_partition(cells, anchor_point(loc, kind, label))
            for degree, band in bands.items():
                entries[(kind, label, degree)] = band
    return RegionMap(loc.id, gw, gl, entries)


def _lateral_sign(entry: Pose, anchor: tuple[float, float]) -> float:
    """Cross product of the entry heading with entry->anchor; >0 means right."""
    hx, hz = heading_vector(entry.heading)
    vx = anchor[0] - entry.cell.x
    vz = anchor[1] - entry.cell.z
    return hx * vz - hz * vx


def select_instance(
    kind: str, modifiers: frozenset[str] | set[str], entry: Pose, loc: Location
) -> tuple[str | None, list[Alert]]:
    """Pick a region instance from an entry pose and left/right/near/far words.

    Left/right split instances by the sign of the cross product of the entry
    heading with the vector to the instance anchor; near/far compare Euclidean
    distance from the entry cell. Underdetermined choices fall back to the
    nearest instance with an ambiguity alert.
    """
    labels = INSTANCE_LABELS[kind]
    alerts: list[Alert] = []
    if len(labels) == 1:
        if modifiers:
            alerts.append(
                Alert(
                    Severity.INFO,
                    AMBIGUOUS_REGION,
                    f"the {kind} region has a single instance; modifiers {sorted(modifiers)} ignored",
                )
            )
        return labels[0], alerts

    def dist(label: str) -> float:
        ax, az = anchor_point(loc, kind, label)
        return math.hypot(ax - entry.cell.x, az - entry.cell.z)

    remaining = list(labels)
    if MOD_LEFT in modifiers:
        remaining = [l for l in remaining if _lateral_sign(entry, anchor_point(loc, kind, l)) < 0]
    if MOD_RIGHT in modifiers:
        remaining = [l for l in remaining if _lateral_sign(entry, anchor_point(loc, kind, l)) > 0]
    if not remaining:
        alerts.append(
            Alert(
                Severity.ERROR,
                EMPTY_SELECTION,
                f"no {kind} instance matches modifiers {sorted(modifiers)} from the entry pose",
            )
        )
        return None, alerts
    if MOD_NEAR in modifiers:
        best = min(dist(l) for l in remaining)
        remaining = [l for l in remaining if dist(l) == best]
    if MOD_FAR in modifiers:
        best = max(dist(l) for l in remaining)
        remaining = [l for l in remaining if dist(l) == best]
    if len(remaining) > 1:
        nearest = min(remaining, key=lambda l: (dist(l), labels.index(l)))
        alerts.append(
            Alert(
                Severity.INFO,
                AMBIGUOUS_REGION,
                f"{kind} instance underdetermined; choosing the nearest ({nearest})",
            )
        )
        return nearest, alerts
    return remaining[0], alerts
