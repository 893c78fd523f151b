"""gridspeak: interpret and simulate controlled-English instructions on a grid world.

The pipeline: load a world (:mod:`gridspeak.world`), parse an instruction
(:mod:`gridspeak.grammar`), resolve its referring expressions to objects,
cells, or paths with graded alerts (:mod:`gridspeak.resolver`), and execute
the resolved plan on a ticking multi-agent simulation
(:mod:`gridspeak.executor`). :mod:`gridspeak.service` exposes the same
pipeline over HTTP and :mod:`gridspeak.cli` from the command line.
"""
from .config import ActionDef, QuantifierTable, default_registry, load_action_registry
from .core import (
    Alert,
    DomainError,
    GridCoord,
    GridspeakError,
    LoadError,
    ParseError,
    PathError,
    ResolutionError,
    Severity,
)
from .executor import Simulation, TraceEvent, find_path, load_script, run_script
from .grammar import Instruction, Lexicon, ObjectSpec, parse_instruction, unparse
from .regions import RegionMap, build_region_map, select_instance
from .relations import PathSpec, along_path, around_path, close_to, is_above, sector_of
from .resolver import RegionGoal, Resolution, resolve
from .world import (
    AgentState,
    Location,
    Pose,
    TypeHierarchy,
    WorldObject,
    WorldState,
    dump_world,
    load_world,
    load_world_file,
)

__version__ = "0.1.0"

__all__ = [
    "ActionDef",
    "AgentState",
    "Alert",
    "DomainError",
    "GridCoord",
    "GridspeakError",
    "Instruction",
    "Lexicon",
    "LoadError",
    "Location",
    "ObjectSpec",
    "ParseError",
    "PathError",
    "PathSpec",
    "Pose",
    "QuantifierTable",
    "RegionGoal",
    "RegionMap",
    "Resolution",
    "ResolutionError",
    "Severity",
    "Simulation",
    "TraceEvent",
    "TypeHierarchy",
    "WorldObject",
    "WorldState",
    "along_path",
    "around_path",
    "build_region_map",
    "close_to",
    "default_registry",
    "dump_world",
    "find_path",
    "is_above",
    "load_action_registry",
    "load_script",
    "load_world",
    "load_world_file",
    "parse_instruction",
    "resolve",
    "run_script",
    "sector_of",
    "select_instance",
    "unparse",
    "__version__",
]
