"""Discrete logarithms in small-characteristic fields.

Quadratic elimination over a degree <= 1 factor base, recursive norm
descent, and dense linear algebra over Z/NZ, with every emitted relation
verified in the target field.
"""

from .tower import FieldTower, build_tower
from .rng import Stream
from .setup import (Setup, SetupError, make_kummer, search_general,
                    save_setup, load_setup, loads_setup, validate_setup)
from .bluher import (BluherSample, bluher_from_u, bluher_set,
                     enumerate_bluher, is_bluher)
from .elim import (Exhausted, Rewrite, TrapH1Root, TrapLevel0, TrapLevelKd,
                   TrapSubfield, check_star_conditions, eliminate_quadratic,
                   is_good, verify_rewrite)
from .descent import (DescentConfig, DescentError, RelationVec, descend,
                      eliminate_even, lift_target, verify_relation)
from .linalg import (RetrySignal, TransformLog, ZnMatrix, lower_row_echelon,
                     solve_final)
from .solver import (Member, ProbablyNotMember, RunReport, SolveConfig,
                     SolveError, collect_relations, membership_test,
                     read_relations, solve_dlp, write_relations)

__version__ = "0.1.0"

__all__ = [
    "FieldTower", "build_tower", "Stream",
    "Setup", "SetupError", "make_kummer", "search_general",
    "save_setup", "load_setup", "loads_setup", "validate_setup",
    "BluherSample", "bluher_from_u", "bluher_set", "enumerate_bluher",
    "is_bluher",
    "Exhausted", "Rewrite", "TrapH1Root", "TrapLevel0", "TrapLevelKd",
    "TrapSubfield", "check_star_conditions", "eliminate_quadratic",
    "is_good", "verify_rewrite",
    "DescentConfig", "DescentError", "RelationVec", "descend",
    "eliminate_even", "lift_target", "verify_relation",
    "RetrySignal", "TransformLog", "ZnMatrix", "lower_row_echelon",
    "solve_final",
    "Member", "ProbablyNotMember", "RunReport", "SolveConfig", "SolveError",
    "collect_relations", "membership_test", "read_relations", "solve_dlp",
    "write_relations",
]
