"""Acceptance gate: one test per required behavior, at its stated tolerance.

Each test here restates a guarantee the package makes — region geometry,
quantifier and determiner semantics, referent resolution, execution fallback,
deterministic replay, parser round-trips, and pathfinding optimality — and
verifies it against an independent oracle or a frozen expected value.
"""
import random
import time

from gridspeak.config import QuantifierTable
from gridspeak.core import GridCoord, Severity
from gridspeak.executor import Simulation, load_script, run_script, find_path
from gridspeak.grammar import Lexicon, parse_instruction, unparse
from gridspeak.regions import (
    anchor_point,
    build_region_map,
    corner_nodes,
    default_grid_depth,
    grid_depths,
    select_instance,
)
from gridspeak.relations import objects_close
from gridspeak.resolver import select_with_determiner
from gridspeak.world import Location, load_world_file

from test_executor import GridStub, bfs_distances, fallback_world, SE_NEAR, SE_PROXIMATE, SE_STRICT
from test_grammar import random_instruction
from test_regions import brute_force_corners, chebyshev, random_room


def warning_events(sim):
    return [e for e in sim.trace if e.kind == "warning"]


def completes(sim):
    return [e.data["status"] for e in sim.trace if e.kind == "complete"]


# 1 ----------------------------------------------------------------------------------


def test_default_grid_depth_follows_the_quarter_rule_exactly():
    expected = {b: 1 for b in range(1, 5)}
    expected.update({b: 2 for b in range(5, 9)})
    expected.update({b: 3 for b in range(9, 13)})
    expected.update({b: 4 for b in range(13, 17)})
    start = time.perf_counter()
    actual = {b: default_grid_depth(b) for b in range(1, 17)}
    elapsed = time.perf_counter() - start
    assert actual == expected
    assert elapsed < 0.001


# 2 ----------------------------------------------------------------------------------


def test_corner_cells_match_the_wall_band_transcription():
    start = time.perf_counter()
    six_by_ten = Location("R", 0, 6, 0, 10)
    gw, gl = grid_depths(six_by_ten)
    corners = corner_nodes(six_by_ten, gw, gl)
    assert all(len(cells) == 6 for cells in corners.values())
    assert sum(len(cells) for cells in corners.values()) == 24

    rng = random.Random(20260814)
    for _ in range(400):
        loc, gw, gl = random_room(rng, max_dim=20)
        assert corner_nodes(loc, gw, gl) == brute_force_corners(loc, gw, gl)
    assert time.perf_counter() - start < 1.0


# 3 ----------------------------------------------------------------------------------


def test_degree_bands_partition_each_region_and_rank_by_distance():
    start = time.perf_counter()
    rng = random.Random(7)
    for _ in range(200):
        loc, _, _ = random_room(rng)
        rmap = build_region_map(loc)
        for kind, instance, _, _ in rmap.rows():
            cells = rmap.cells(kind, instance)
            if not cells:
                continue
            anchor = anchor_point(loc, kind, instance)
            bands = [rmap.cells(kind, instance, d) for d in ("strict", "proximate", "near")]
            assert sum(len(b) for b in bands) == len(cells)
            assert frozenset().union(*bands) == cells
            for nearer, farther in zip(bands, bands[1:]):
                if nearer and farther:
                    assert max(chebyshev(c, anchor) for c in nearer) <= min(
                        chebyshev(c, anchor) for c in farther
                    )
    assert time.perf_counter() - start < 1.0


# 4 ----------------------------------------------------------------------------------


def test_quantifier_words_map_to_the_documented_counts():
    table = QuantifierTable()
    available = 50
    assert table.value("all", available) == available
    assert table.value("a lot of", available) == 10
    assert table.value("many", available) == 8
    assert table.value("several", available) == 6
    assert table.value("a few", available) == 4
    assert table.value("a couple", available) == 2
    assert table.value("any", available) == 1


# 5 ----------------------------------------------------------------------------------


def test_a_couple_of_yellow_bananas_eats_exactly_two_with_no_warning(single_world):
    sim = Simulation(single_world)
    resolution = sim.submit("worker", "Eat a couple of yellow bananas")
    sim.run_until_idle()
    assert resolution.objects == ("banana-y0", "banana-y1")
    assert resolution.warnings == ()
    assert warning_events(sim) == []
    consumed = sorted(o.id for o in single_world.objects.values() if o.consumed)
    assert consumed == ["banana-y0", "banana-y1"]
    acts = [(e.data["verb"], e.data["object"]) for e in sim.trace if e.kind == "act"]
    assert acts == [("eat", "banana-y0"), ("eat", "banana-y1")]
    assert completes(sim) == ["ok"]


# 6 ----------------------------------------------------------------------------------


def test_green_banana_shortfall_eats_all_three_and_warns_once(single_world):
    sim = Simulation(single_world)
    resolution = sim.submit("worker", "Eat a few green bananas above the round table")
    sim.run_until_idle()
    assert resolution.objects == ("banana-g0", "banana-g1", "banana-g2")
    shortfalls = [w for w in resolution.warnings if w.code == "QUANT_SHORTFALL"]
    assert len(shortfalls) == 1 and len(resolution.warnings) == 1
    assert shortfalls[0].severity == Severity.WARNING
    assert "4" in shortfalls[0].message  # a few asks for four
    consumed = sorted(o.id for o in single_world.objects.values() if o.consumed)
    assert consumed == ["banana-g0", "banana-g1", "banana-g2"]
    assert not single_world.objects["banana-g3"].consumed  # the desk banana stays
    assert completes(sim) == ["ok"]


# 7 ----------------------------------------------------------------------------------


def test_conjoined_nearness_with_region_selects_the_qualifying_mice(single_world):
    world = single_world
    sentence = (
        "Pickup all blue mice that are near a monitor and keyboard "
        "in the strict far right corner of Laboratory 0"
    )
    lab = world.locations["Laboratory 0"]
    worker = world.agents["worker"]

    # Independent oracle. The region phrase binds to the nearest ground (the
    # keyboard), so a qualifying mouse is blue, near any monitor, and near a
    # keyboard that sits on a strict cell of the far-right corner.
    instance, _ = select_instance("corner", {"far", "right"}, worker.entry_poses["Laboratory 0"], lab)
    region_cells = world.region_map("Laboratory 0").cells("corner", instance, "strict")
    corner_keyboards = [
        k for k in world.matching_type("keyboard") if world.footprint(k) & region_cells
    ]
    assert corner_keyboards, "fixture should keep a keyboard on a strict corner cell"
    oracle = sorted(
        mouse.id
        for mouse in world.matching_type("mouse")
        if mouse.properties.get("color") == "blue"
        and any(objects_close(world, m, mouse) for m in world.matching_type("monitor"))
        and any(objects_close(world, k, mouse) for k in corner_keyboards)
    )
    assert oracle == ["mouse-0", "mouse-1"]

    sim = Simulation(world)
    resolution = sim.submit("worker", sentence)
    assert sorted(resolution.objects) == oracle
    assert not resolution.is_error
    sim.run_until_idle()
    assert completes(sim) == ["ok"]
    assert [world.objects[oid].carried_by for oid in oracle] == ["worker", "worker"]


# 8 ----------------------------------------------------------------------------------


def test_three_agent_scripts_deliver_everything_and_replay_byte_identically(data_dir):
    start = time.perf_counter()
    traces = []
    for _ in range(2):
        world = load_world_file(data_dir / "campus.world.yaml")
        sim = run_script(
            world,
            {
                agent: load_script(data_dir / f"{agent}.txt")
                for agent in ("admin", "housekeeper", "student")
            },
        )
        traces.append("\n".join(e.to_line() for e in sim.trace) + "\n")
    assert traces[0] == traces[1]
    golden = (data_dir / "campus.trace.txt").read_text()
    assert traces[0] == golden

    from gridspeak.relations import is_above

    assert is_above(world, world.objects["poster0"], world.objects["billboard0"])
    assert is_above(world, world.objects["mail0"], world.objects["container0"])
    assert world.objects["mail0"].location_id == "Office 0"
    assert completes(sim) == ["ok"] * 6
    assert time.perf_counter() - start < 5.0


# 9 ----------------------------------------------------------------------------------


def test_blocked_region_degrees_fall_back_in_order():
    sim = Simulation(fallback_world(sorted(SE_STRICT)))
    sim.submit("bot", "Stand in the corner")
    sim.run_until_idle()
    assert sim.world.agents["bot"].pose.cell in SE_PROXIMATE
    downgrades = [
        e
        for e in sim.trace
        if e.kind == "warning" and e.data["code"] == "DEGRADED_DEGREE"
    ]
    assert len(downgrades) == 1 and downgrades[0].data["severity"] == "info"

    sim = Simulation(fallback_world(sorted(SE_STRICT | SE_PROXIMATE)))
    sim.submit("bot", "Stand in the corner")
    sim.run_until_idle()
    assert sim.world.agents["bot"].pose.cell in SE_NEAR
    assert completes(sim) == ["ok"]


# 10 ---------------------------------------------------------------------------------


def test_determiners_cover_selection_uniqueness_history_and_ownership(single_world):
    world = single_world
    sim = Simulation(world)
    worker = world.agents["worker"]

    # a: first match, silently.
    res = sim.submit("worker", "Eat a yellow banana")
    assert res.objects == ("banana-y0",) and res.warnings == ()

    # the: picks one but flags the ambiguity.
    res = sim.submit("worker", "Eat the yellow banana")
    assert res.objects == ("banana-y0",)
    assert [w.code for w in res.warnings] == ["AMBIGUOUS_THE"]
    assert res.warnings[0].severity == Severity.WARNING

    # the only: same pick, but a strong complaint when several match.
    res = sim.submit("worker", "Eat the only yellow banana")
    assert [(w.code, w.severity) for w in res.warnings] == [
        ("THE_ONLY_VIOLATION", Severity.STRONG)
    ]

    # the same: follows interaction history; warns when there is none.
    res = sim.submit("worker", "Eat the same yellow banana")
    assert [w.code for w in res.warnings] == ["NO_SAME_IN_HISTORY"]
    world.record_interaction("worker", "eat", "banana-y1", sim.tick_count)
    res = sim.submit("worker", "Eat the same yellow banana")
    assert res.objects == ("banana-y1",) and res.warnings == ()

    # different: avoids history, and complains when nothing new is left.
    res = sim.submit("worker", "Eat a different yellow banana")
    assert res.objects == ("banana-y0",)
    for oid in ("banana-y0", "banana-y2"):
        world.record_interaction("worker", "eat", oid, sim.tick_count)
    res = sim.submit("worker", "Eat a different yellow banana")
    assert res.objects == ()
    assert "NO_DIFFERENT_LEFT" in [w.code for w in res.warnings]
    assert res.is_error

    # both / either: count checks against exactly two.
    res = sim.submit("worker", "Eat both yellow bananas")
    assert len(res.objects) == 2
    assert [w.code for w in res.warnings] == ["BOTH_COUNT"]
    res = sim.submit("worker", "Eat either yellow banana")
    assert len(res.objects) == 1
    assert [w.code for w in res.warnings] == ["EITHER_COUNT"]
    selected, alerts = select_with_determiner(["m1", "m2"], "both", worker, "eat")
    assert (selected, alerts) == (["m1", "m2"], [])
    selected, alerts = select_with_determiner(["m1", "m2"], "either", worker, "eat")
    assert (selected, alerts) == (["m1"], [])

    # your + quantifier: only owned objects are eligible.
    res = sim.submit("worker", "Eat a couple of your yellow bananas")
    assert res.objects == ("banana-y0", "banana-y2")
    assert all(world.objects[oid].owner_id == "worker" for oid in res.objects)
    assert res.warnings == ()


# 11 ---------------------------------------------------------------------------------


def test_every_scripted_sentence_parses_and_fuzzed_trees_round_trip(data_dir):
    campus = load_world_file(data_dir / "campus.world.yaml")
    single = load_world_file(data_dir / "single.world.yaml")
    from gridspeak.config import default_registry

    campus_lexicon = Lexicon.build(default_registry(), campus)
    single_lexicon = Lexicon.build(default_registry(), single)

    quoted = []
    for name in ("admin.txt", "housekeeper.txt", "student.txt"):
        quoted += [
            (campus_lexicon, line)
            for line in (data_dir / name).read_text().splitlines()
            if line.strip()
        ]
    quoted += [
        (single_lexicon, "Eat a couple of yellow bananas"),
        (single_lexicon, "Eat a few green bananas above the round table"),
        (
            single_lexicon,
            "Pickup all blue mice that are near a monitor and keyboard "
            "in the strict far right corner of Laboratory 0",
        ),
        (campus_lexicon, "Go to the far left corner of Hallway 1"),
        (campus_lexicon, "Stand in front of the billboard"),
        (campus_lexicon, "Go along the billboard"),
        (campus_lexicon, "Go around the green container"),
    ]
    for lexicon, line in quoted:
        ast = parse_instruction(line, lexicon)
        assert parse_instruction(unparse(ast), lexicon) == ast, line

    rng = random.Random(424242)
    checked = 0
    for _ in range(1000):
        tree = random_instruction(rng)
        assert parse_instruction(unparse(tree), campus_lexicon) == tree
        checked += 1
    assert checked >= 1000


# 12 ---------------------------------------------------------------------------------


def test_shortest_paths_match_breadth_first_distances_on_100_maps():
    start = time.perf_counter()
    rng = random.Random(987654321)
    size = 20
    for _ in range(100):
        cells = [GridCoord(x, z) for x in range(size) for z in range(size)]
        blocked = {c for c in cells if rng.random() < 0.3}
        free = [c for c in cells if c not in blocked]
        stub = GridStub(size, blocked)
        origin = rng.choice(free)
        goals = tuple(rng.sample(free, 3))
        path = find_path(stub, origin, goals)
        dist = bfs_distances(stub, origin)
        reachable = [dist[g] for g in goals if g in dist]
        if origin in goals:
            assert path == []
        elif not reachable:
            assert path is None
        else:
            assert path is not None and len(path) == min(reachable)
    assert time.perf_counter() - start < 2.0
