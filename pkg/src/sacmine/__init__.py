"""sacmine: symbolic time-interval mining with semantic adjacency pruning."""

__version__ = "0.1.0"

from .model import (
    EntityRecord,
    FoldSpec,
    IntervalDatabase,
    Symbol,
    SymbolicInterval,
    assign_folds,
    build_database,
    lex_compare,
    normalize_entity,
)
from .relations import RelationConfig, classify_pair, compose, to_abstract
from .karmalego import TIRP, EnumerationTree, MiningConfig, TIRPNode, mine

__all__ = [
    "EntityRecord",
    "FoldSpec",
    "IntervalDatabase",
    "Symbol",
    "SymbolicInterval",
    "assign_folds",
    "build_database",
    "lex_compare",
    "normalize_entity",
    "RelationConfig",
    "classify_pair",
    "compose",
    "to_abstract",
    "TIRP",
    "EnumerationTree",
    "MiningConfig",
    "TIRPNode",
    "mine",
]
