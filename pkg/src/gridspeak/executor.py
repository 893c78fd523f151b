"""Plan and execute resolved instructions on a ticking multi-agent world."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import regions as regions_mod
from . import relations as relations_mod
from .config import ActionDef, QuantifierTable, default_registry
from .core import (
    ACT_FAILED,
    Alert,
    DEGRADED_DEGREE,
    GridCoord,
    PATH_BLOCKED,
    ParseError,
    REGION_UNREACHABLE,
    Severity,
    heading_from_step,
)
from .grammar import Instruction, Lexicon, parse_instruction
from .resolver import DEFAULT_SEED, RegionGoal, Resolution, resolve
from .world import Pose, WorldState

MAX_STALL_TICKS = 5

_DIRECTIONS = (GridCoord(0, -1), GridCoord(1, 0), GridCoord(0, 1), GridCoord(-1, 0))


def find_path(
    world: WorldState,
    start: GridCoord,
    goals: Sequence[GridCoord],
    ignore_agent: str | None = None,
) -> list[GridCoord] | None:
    """A* over the 4-connected grid to the best of several goal cells.

    Returns the step cells excluding ``start`` ([] when already on a goal),
    or None when every goal is unreachable. Among equally distant goals the
    one listed first wins, so the result is deterministic.
    """
    goal_index = {}
    for i, g in enumerate(goals):
        goal_index.setdefault(g, i)
    if start in goal_index:
        return []
    blocked = world.blocked_cells(ignore_agent)
    passable = world.walkable - frozenset(blocked)
    live_goals = [g for g in goals if g in passable]
    if not live_goals:
        return None

    def heuristic(cell: GridCoord) -> int:
        return min(abs(cell.x - g.x) + abs(cell.z - g.z) for g in live_goals)

    dist: dict[GridCoord, int] = {start: 0}
    parent: dict[GridCoord, GridCoord] = {}
    settled: set[GridCoord] = set()
    counter = 0
    heap: list[tuple[int, int, int, GridCoord]] = [(heuristic(start), 0, counter, start)]
    best: tuple[int, int, GridCoord] | None = None  # (distance, goal order, cell)
    while heap:
        f, g, _, cell = heapq.heappop(heap)
        if best is not None and f > best[0]:
            break
        if cell in settled:
            continue
        settled.add(cell)
        if cell in goal_index:
            candidate = (g, goal_index[cell], cell)
            if best is None or candidate < best:
                best = candidate
        for d in _DIRECTIONS:
            nxt = GridCoord(cell.x + d.x, cell.z + d.z)
            if nxt not in passable:
                continue
            ng = g + 1
            if ng < dist.get(nxt, ng + 1):
                dist[nxt] = ng
                parent[nxt] = cell
                counter += 1
                heapq.heappush(heap, (ng + heuristic(nxt), ng, counter, nxt))
    if best is None:
        return None
    path = [best[2]]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return path[1:]


# -- trace -----------------------------------------------------------------


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    agent_id: str
    kind: str
    data: dict

    def to_line(self) -> str:
        return f"[{self.tick:04d}] {self.agent_id} {self.kind} {self._detail()}".rstrip()

    def _detail(self) -> str:
        d = self.data
        if self.kind == "instruction":
            return f"{d['seq']} \"{d['text']}\""
        if self.kind == "resolve":
            parts = []
            if d.get("objects"):
                parts.append("objects=" + ",".join(d["objects"]))
            if d.get("cells") is not None:
                parts.append(f"cells={d['cells']}")
            if d.get("region"):
                parts.append(f"region={d['region']}")
            if d.get("path") is not None:
                parts.append(f"path={d['path']}")
            if not parts:
                parts.append("none")
            parts.append(f"warnings={d['warnings']}")
            return " ".join(parts)
        if self.kind == "warning":
            return f"{d['severity']} {d['code']} {d['message']}"
        if self.kind == "move":
            fx, fz = d["from"]
            tx, tz = d["to"]
            return f"({fx},{fz})->({tx},{tz})"
        if self.kind == "act":
            return f"{d['verb']} {d['object']}"
        if self.kind == "place":
            if d.get("destination"):
                return f"{d['object']} on {d['destination']}"
            x, z = d["cell"]
            return f"{d['object']} at ({x},{z})"
        if self.kind == "complete":
            return f"{d['seq']} {d['status']}"
        return " ".join(f"{k}={v}" for k, v in sorted(d.items()))

    def to_payload(self) -> dict:
        return {"tick": self.tick, "agent": self.agent_id, "kind": self.kind, **self.data}


# -- plans -------------------------------------------------------------------


@dataclass
class NavigateStep:
    goals: tuple[GridCoord, ...] | None = None
    object_id: str | None = None
    region: RegionGoal | None = None
    exact: bool = False
    chain: str | None = None


@dataclass
class ActStep:
    object_id: str
    mode: str = "apply"  # apply | take | place
    destination: str | None = None
    chain: str | None = None


@dataclass
class Job:
    seq: int
    instruction: Instruction
    resolution: Resolution
    action: ActionDef | None
    steps: list
    step_index: int = 0
    act_remaining: int = 0
    stall: int = 0
    failed: bool = False


def build_steps(resolution: Resolution, action: ActionDef | None) -> list:
    """Turn a resolution into navigate/act steps."""
    if resolution.is_error:
        return []
    effect = action.effect if action else "none"
    steps: list = []
    if resolution.kind == "objects":
        for oid in resolution.objects:
            if effect == "none":
                steps.append(NavigateStep(object_id=oid, chain=oid))
            elif effect == "place":
                steps.append(NavigateStep(object_id=oid, chain=oid))
                steps.append(ActStep(oid, mode="take", chain=oid))
                if resolution.destination:
                    steps.append(
                        NavigateStep(object_id=resolution.destination, chain=oid)
                    )
                steps.append(
                    ActStep(oid, mode="place", destination=resolution.destination, chain=oid)
                )
            else:
                steps.append(NavigateStep(object_id=oid, chain=oid))
                steps.append(ActStep(oid, chain=oid))
    elif resolution.kind == "path" and resolution.path is not None:
        for waypoint in resolution.path.waypoints:
            steps.append(NavigateStep(goals=(waypoint,), exact=True))
    elif resolution.kind == "cells":
        if resolution.region_goal is not None:
            # Band choice happens when the step starts, so blockage discovered
            # at run time can still demote strict -> proximate -> near.
            steps.append(NavigateStep(region=resolution.region_goal))
        else:
            steps.append(NavigateStep(goals=resolution.cells))
    return steps


# -- simulation --------------------------------------------------------------


def load_script(path: str) -> list[str]:
    """Instruction lines from a script file, blanks and comments dropped."""
    lines: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                lines.append(line)
    return lines


class Simulation:
    """Tick-synchronous execution of instructions from several agents.

    Each tick every agent, in world declaration order, spends at most one
    unit of work: one cell of movement or one tick of acting. Referents are
    bound when an instruction is submitted; navigation re-plans every tick.
    """

    def __init__(
        self,
        world: WorldState,
        *,
        registry: dict[str, ActionDef] | None = None,
        qtable: QuantifierTable | None = None,
        seed: int = DEFAULT_SEED,
        radius: float | None = None,
    ):
        self.world = world
        self.registry = registry if registry is not None else default_registry()
        self.qtable = qtable or QuantifierTable()
        self.seed = seed
        self.radius = radius
        self.lexicon = Lexicon.build(self.registry, world)
        self.trace: list[TraceEvent] = []
        self.tick_count = 0
        self._queues: dict[str, deque[Job]] = {a: deque() for a in world.agents}
        self._active: dict[str, Job | None] = {a: None for a in world.agents}
        self._scripts: dict[str, deque[str]] = {a: deque() for a in world.agents}
        self._seq: dict[str, int] = {a: 0 for a in world.agents}

    # -- intake ---------------------------------------------------------

    def queue_script(self, agent_id: str, lines: Iterable[str]) -> None:
        if agent_id not in self.world.agents:
            raise KeyError(f"unknown agent {agent_id!r}")
        self._scripts[agent_id].extend(lines)

    def submit(self, agent_id: str, text: str) -> Resolution:
        """Parse, resolve against the current world, and enqueue for execution."""
        if agent_id not in self.world.agents:
            raise KeyError(f"unknown agent {agent_id!r}")
        instruction = parse_instruction(text, self.lexicon)
        action = self.registry.get(instruction.verb)
        resolution = resolve(
            self.world,
            agent_id,
            instruction,
            action=action,
            qtable=self.qtable,
            seed=self.seed,
            radius=self.radius,
        )
        self._seq[agent_id] += 1
        seq = self._seq[agent_id]
        self._emit(agent_id, "instruction", {"seq": seq, "text": text})
        self._emit_resolution(agent_id, resolution)
        job = Job(seq, instruction, resolution, action, build_steps(resolution, action))
        if resolution.is_error:
            job.failed = True
        self._queues[agent_id].append(job)
        return resolution

    def _emit_resolution(self, agent_id: str, resolution: Resolution) -> None:
        data: dict = {"warnings": len(resolution.warnings)}
        if resolution.objects:
            data["objects"] = list(resolution.objects)
        if resolution.kind == "cells":
            data["cells"] = len(resolution.cells)
            if resolution.region_goal:
                g = resolution.region_goal
                data["region"] = f"{g.kind}/{g.instance}/{g.degree or 'auto'}"
        if resolution.path is not None:
            data["path"] = len(resolution.path.waypoints)
        self._emit(agent_id, "resolve", data)
        for alert in resolution.warnings:
            self._emit_alert(agent_id, alert)

    def _emit_alert(self, agent_id: str, alert: Alert) -> None:
        self._emit(
            agent_id,
            "warning",
            {"severity": alert.severity.label, "code": alert.code, "message": alert.message},
        )

    def _emit(self, agent_id: str, kind: str, data: dict) -> None:
        self.trace.append(TraceEvent(self.tick_count, agent_id, kind, data))

    # -- state ------------------------------------------------------------

    @property
    def idle(self) -> bool:
        return all(
            self._active[a] is None and not self._queues[a] and not self._scripts[a]
            for a in self.world.agents
        )

    def events_since(self, tick: int) -> list[TraceEvent]:
        return [e for e in self.trace if e.tick > tick]

    # -- ticking -----------------------------------------------------------

    def tick(self) -> list[TraceEvent]:
        """Advance the world one tick; returns the events it produced."""
        self.tick_count += 1
        before = len(self.trace)
        for agent_id in self.world.agents:
            self._advance(agent_id)
        return self.trace[before:]

    def run_until_idle(self, max_ticks: int = 2000) -> int:
        while not self.idle and self.tick_count < max_ticks:
            self.tick()
        return self.tick_count

    def _advance(self, agent_id: str) -> None:
        job = self._active[agent_id]
        if job is None:
            job = self._start_next(agent_id)
            if job is None:
                return
        agent = self.world.agents[agent_id]
        while True:
            if job.failed or job.step_index >= len(job.steps):
                self._complete(agent_id, job)
                return
            step = job.steps[job.step_index]
            if isinstance(step, NavigateStep):
                goals = self._current_goals(agent_id, job, step)
                if goals is None:
                    continue  # step (or object chain) was skipped or job failed
                if agent.pose.cell in goals:
                    job.step_index += 1
                    job.stall = 0
                    continue
                path = find_path(self.world, agent.pose.cell, goals, ignore_agent=agent_id)
                if not path:
                    job.stall += 1
                    if job.stall >= MAX_STALL_TICKS:
                        self._emit_alert(
                            agent_id,
                            Alert(Severity.ERROR, PATH_BLOCKED, "no route to the target"),
                        )
                        job.failed = True
                        self._complete(agent_id, job)
                    return  # waiting still spends the tick
                job.stall = 0
                self._move(agent_id, path[0])
                if agent.pose.cell in goals:
                    job.step_index += 1
                    if job.step_index >= len(job.steps):
                        self._complete(agent_id, job)
                return
            if isinstance(step, ActStep):
                if job.act_remaining == 0:
                    duration = job.action.duration_ticks if job.action else 1
                    job.act_remaining = duration
                job.act_remaining -= 1
                if job.act_remaining == 0:
                    self._perform_act(agent_id, job, step)
                    job.step_index += 1
                    if job.failed or job.step_index >= len(job.steps):
                        self._complete(agent_id, job)
                return
            raise AssertionError(f"unknown step {step!r}")

    def _start_next(self, agent_id: str) -> Job | None:
        if not self._queues[agent_id] and self._scripts[agent_id]:
            line = self._scripts[agent_id].popleft()
            try:
                self.submit(agent_id, line)
            except ParseError as exc:
                self._seq[agent_id] += 1
                self._emit(agent_id, "instruction", {"seq": self._seq[agent_id], "text": line})
                self._emit(
                    agent_id,
                    "warning",
                    {"severity": Severity.ERROR.label, "code": "PARSE_ERROR", "message": str(exc)},
                )
                self._emit(
                    agent_id, "complete", {"seq": self._seq[agent_id], "status": "failed"}
                )
                return None
        if self._queues[agent_id]:
            job = self._queues[agent_id].popleft()
            self._active[agent_id] = job
            return job
        return None

    def _complete(self, agent_id: str, job: Job) -> None:
        status = "failed" if job.failed else "ok"
        self._emit(agent_id, "complete", {"seq": job.seq, "status": status})
        self._active[agent_id] = None

    # -- navigation goals --------------------------------------------------

    def _current_goals(self, agent_id: str, job: Job, step: NavigateStep) -> tuple[GridCoord, ...] | None:
        """The goal cells for a navigate step, recomputed for moving targets.

        Returns None after mutating the job (skipping the step or failing)
        so the caller's loop re-examines the plan.
        """
        world = self.world
        if step.object_id is not None:
            obj = world.objects.get(step.object_id)
            if obj is None or obj.consumed:
                self._emit_alert(
                    agent_id,
                    Alert(
                        Severity.WARNING,
                        ACT_FAILED,
                        f"{step.object_id} is no longer available",
                    ),
                )
                self._skip_chain(job, step.chain)
                return None
            if obj.carried_by == agent_id:
                return (world.agents[agent_id].pose.cell,)
            band = relations_mod.close_band(world, obj, self.radius)
            if not band:
                self._emit_alert(
                    agent_id,
                    Alert(Severity.ERROR, PATH_BLOCKED, f"no walkable cell close to {obj.id}"),
                )
                job.failed = True
                return None
            return tuple(band)
        if step.region is not None and step.goals is None:
            goal = step.region
            rmap = world.region_map(goal.location_id)
            degrees = (
                [goal.degree]
                if goal.degree is not None
                else [regions_mod.STRICT, regions_mod.PROXIMATE, regions_mod.NEAR]
            )
            agent = world.agents[agent_id]
            for degree in degrees:
                cells = rmap.cells(goal.kind, goal.instance, degree)
                if not cells:
                    continue
                ordered = tuple(sorted(cells))
                path = find_path(world, agent.pose.cell, ordered, ignore_agent=agent_id)
                if path is not None:
                    if degree != degrees[0]:
                        self._emit_alert(
                            agent_id,
                            Alert(
                                Severity.INFO,
                                DEGRADED_DEGREE,
                                f"{degrees[0]} band unreachable; settling for {degree}",
                            ),
                        )
                    step.goals = ordered
                    return ordered
            self._emit_alert(
                agent_id,
                Alert(Severity.ERROR, REGION_UNREACHABLE, "no band of the region is reachable"),
            )
            job.failed = True
            return None
        return step.goals

    def _skip_chain(self, job: Job, chain: str | None) -> None:
        if chain is None:
            job.step_index += 1
            return
        while job.step_index < len(job.steps):
            step = job.steps[job.step_index]
            if getattr(step, "chain", None) != chain:
                break
            job.step_index += 1

    # -- effects -------------------------------------------------------------

    def _move(self, agent_id: str, cell: GridCoord) -> None:
        world = self.world
        agent = world.agents[agent_id]
        old = agent.pose.cell
        heading = heading_from_step(cell.x - old.x, cell.z - old.z)
        old_loc = world.location_of_cell(old)
        new_loc = world.location_of_cell(cell)
        agent.pose = Pose(cell, heading)
        if new_loc is not None and (old_loc is None or new_loc.id != old_loc.id):
            agent.entry_poses[new_loc.id] = agent.pose
        if new_loc is not None:
            for oid in agent.inventory:
                world.objects[oid].location_id = new_loc.id
        self._emit(agent_id, "move", {"from": [old.x, old.z], "to": [cell.x, cell.z]})

    def _perform_act(self, agent_id: str, job: Job, step: ActStep) -> None:
        world = self.world
        agent = world.agents[agent_id]
        verb = job.action.verb if job.action else job.instruction.verb
        obj = world.objects.get(step.object_id)
        if obj is None or obj.consumed:
            self._emit_alert(
                agent_id,
                Alert(Severity.WARNING, ACT_FAILED, f"{step.object_id} is no longer available"),
            )
            self._skip_chain(job, step.chain)
            job.step_index -= 1  # _advance will bump it back
            return
        if step.mode == "take":
            if obj.carried_by not in (None, agent_id):
                self._emit_alert(
                    agent_id,
                    Alert(Severity.WARNING, ACT_FAILED, f"{obj.id} is carried by {obj.carried_by}"),
                )
                self._skip_chain(job, step.chain)
                job.step_index -= 1
                return
            obj.carried_by = agent_id
            if obj.id not in agent.inventory:
                agent.inventory.append(obj.id)
            self._emit(agent_id, "act", {"verb": "take", "object": obj.id})
            return
        if step.mode == "place":
            self._place(agent_id, job, obj, step.destination, verb)
            return
        effect = job.action.effect if job.action else "none"
        if effect in ("consume", "acquire") and obj.carried_by not in (None, agent_id):
            self._emit_alert(
                agent_id,
                Alert(Severity.WARNING, ACT_FAILED, f"{obj.id} is carried by {obj.carried_by}"),
            )
            return
        if effect == "consume":
            if obj.carried_by == agent_id and obj.id in agent.inventory:
                agent.inventory.remove(obj.id)
            obj.carried_by = None
            obj.consumed = True
        elif effect == "acquire":
            obj.carried_by = agent_id
            if obj.id not in agent.inventory:
                agent.inventory.append(obj.id)
        elif effect == "transform":
            obj.properties["state"] = f"{verb}ed"
        world.record_interaction(agent_id, verb, obj.id, self.tick_count)
        self._emit(agent_id, "act", {"verb": verb, "object": obj.id})

    def _place(self, agent_id: str, job: Job, obj, destination: str | None, verb: str) -> None:
        world = self.world
        agent = world.agents[agent_id]
        dest = world.objects.get(destination) if destination else None
        if destination and (dest is None or dest.consumed):
            self._emit_alert(
                agent_id,
                Alert(Severity.WARNING, ACT_FAILED, f"{destination} is no longer available"),
            )
            dest = None
        dx = obj.bbox_max[0] - obj.bbox_min[0]
        dy = obj.bbox_max[1] - obj.bbox_min[1]
        dz = obj.bbox_max[2] - obj.bbox_min[2]
        data: dict
        if dest is not None:
            lo, hi = world.effective_bbox(dest)
            cx, cz = (lo[0] + hi[0]) / 2, (lo[2] + hi[2]) / 2
            y0 = hi[1]
            obj.location_id = dest.location_id
            data = {"object": obj.id, "destination": dest.id}
        else:
            cell = self._drop_cell(agent_id)
            cx, cz, y0 = float(cell.x), float(cell.z), 0.0
            loc = world.location_of_cell(cell)
            if loc is not None:
                obj.location_id = loc.id
            data = {"object": obj.id, "cell": [cell.x, cell.z]}
        obj.bbox_min = (cx - dx / 2, y0, cz - dz / 2)
        obj.bbox_max = (cx + dx / 2, y0 + dy, cz + dz / 2)
        obj.carried_by = None
        if obj.id in agent.inventory:
            agent.inventory.remove(obj.id)
        world.record_interaction(agent_id, verb, obj.id, self.tick_count)
        self._emit(agent_id, "place", data)

    def _drop_cell(self, agent_id: str) -> GridCoord:
        world = self.world
        agent = world.agents[agent_id]
        blocked = world.blocked_cells(ignore_agent=agent_id)
        for d in _DIRECTIONS:
            cell = GridCoord(agent.pose.cell.x + d.x, agent.pose.cell.z + d.z)
            if cell in world.walkable and cell not in blocked:
                return cell
        return agent.pose.cell


def run_script(
    world: WorldState,
    scripts: dict[str, Iterable[str]],
    *,
    registry: dict[str, ActionDef] | None = None,
    qtable: QuantifierTable | None = None,
    seed: int = DEFAULT_SEED,
    radius: float | None = None,
    max_ticks: int = 2000,
) -> Simulation:
    """Run whole scripts (one list of lines per agent) until everyone is idle."""
    sim = Simulation(world, registry=registry, qtable=qtable, seed=seed, radius=radius)
    for agent_id, lines in scripts.items():
        sim.queue_script(agent_id, lines)
    sim.run_until_idle(max_ticks)
    return sim
