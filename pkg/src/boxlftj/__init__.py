"""Leapfrog Triejoin over TrieArrays with out-of-core boxing."""
from .boxer import Box, BoxingConfig, InfeasibleBudget, assign_budgets, run_boxed
from .io_model import BlockModel, RunStats, gen_pathological
from .leapfrog import LeapfrogJoin, intersect, lfj_init
from .query import Atom, Query, QueryError, normalize, parse
from .relation_store import (
    NEG_INF,
    POS_INF,
    RelationCatalog,
    TrieArray,
    build_from_sorted,
    load,
    persist,
)
from .slicer import SPILL, probe, provision
from .trie_iter import ContractViolation, EqualIterator, TrieIterator
from .triejoin import JoinPlan, ResultSink, lftj_run, plan_from_catalog

__version__ = "0.1.0"
