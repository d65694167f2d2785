"""Wiring: load relations, plan the query, run boxed or vanilla, report stats."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .boxer import BoxingConfig, parse_ratio, run_boxed, stored_relations
from .io_model import BlockModel, ChargedArray, RunStats
from .query import Query, normalize, parse
from .relation_store import RelationCatalog, build_from_sorted, ingest_csv, load
from .slicer import HEADER_WORDS
from .triejoin import AtomSource, JoinPlan, ResultSink, lftj_parallel, lftj_run

log = logging.getLogger(__name__)

FOOTPRINT_METRIC = f"copied_words+{HEADER_WORDS}_per_array"


@dataclass
class RunConfig:
    query_file: str | None = None
    query_text: str | None = None
    bindings: dict[str, str] = field(default_factory=dict)
    order: tuple[str, ...] | None = None
    memory_words: int = 1 << 20
    block_size: int = 512
    mode: str = "boxed"  # boxed | vanilla
    sink: str = "count"  # count | list
    out: str | None = None
    ratio: str | None = None
    constraint_hook: bool = False
    parallel: int = 1
    lazy: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.memory_words <= 0 or self.block_size <= 0 or self.parallel <= 0:
            raise ValueError("memory, block size and parallel width must be positive")
        if self.mode not in ("boxed", "vanilla"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.sink not in ("count", "list"):
            raise ValueError(f"unknown sink {self.sink!r}")


def load_relation(path: str):
    p = Path(path)
    if p.suffix.lower() == ".csv":
        with open(p) as fh:
            first = next((ln for ln in fh if ln.strip()), None)
        if first is None:
            raise ValueError(f"{path}: empty CSV; store empty relations as TrieArray files")
        arity = len(first.split(","))
        return build_from_sorted(ingest_csv(p, arity), arity)
    return load(p)


def build_catalog(bindings: dict[str, str]) -> RelationCatalog:
    cat = RelationCatalog()
    for name, path in bindings.items():
        cat.add(name, load_relation(path), str(path))
    return cat


def run_vanilla(q: Query, catalog: RelationCatalog, memory_words: int, block_size: int,
                sink: ResultSink, parallel: int = 1) -> RunStats:
    """Unboxed LFTJ straight over the stored arrays, every word access
    charged to an LRU pool of ``memory_words // block_size`` frames.
    Parallel runs skip the simulation."""
    stats = RunStats()
    model = BlockModel(memory_words, block_size) if parallel == 1 else None
    arrays: dict = {}
    for key, rel in stored_relations(q, catalog).items():
        if model is None:
            arrays[key] = (rel.vals, rel.idxs)
        else:
            arrays[key] = (
                [ChargedArray(v, f, model) for v, f in zip(rel.vals, rel.val_files)],
                [ChargedArray(i, f, model) for i, f in zip(rel.idxs, rel.idx_files)],
            )
    atoms = []
    for atom in q.atoms:
        if atom.builtin:
            atoms.append(AtomSource(atom.vars))
        else:
            atoms.append(AtomSource(atom.vars, *arrays[(atom.relation, atom.permutation)]))
    plan = JoinPlan(q.order, q.head, atoms)
    if parallel > 1:
        lftj_parallel(plan, sink, parallel)
    else:
        lftj_run(plan, sink)
    sink.flush()
    if model is not None:
        stats.lru_block_loads = model.loads
        stats.lru_evictions = model.evictions
    stats.boxes = 1
    stats.output_count = sink.count
    stats.output_block_writes = sink.output_block_writes
    stats.iterator_ops = sink.iterator_ops
    return stats


def prepare_query(text: str, catalog: RelationCatalog, order=None) -> Query:
    return normalize(parse(text, arities=catalog.arities(), order=order))


def execute(q: Query, catalog: RelationCatalog, cfg: RunConfig) -> tuple[ResultSink, RunStats]:
    sink = ResultSink(cfg.sink, out=cfg.out, block_size=cfg.block_size)
    try:
        if cfg.mode == "vanilla":
            stats = run_vanilla(q, catalog, cfg.memory_words, cfg.block_size, sink, cfg.parallel)
        else:
            bcfg = BoxingConfig(
                cfg.memory_words, cfg.block_size, parse_ratio(cfg.ratio),
                cfg.constraint_hook, cfg.lazy, cfg.parallel, record_boxes=False,
            )
            _, stats, _ = run_boxed(q, catalog, bcfg, sink)
    finally:
        sink.close()
    return sink, stats


def format_stats(cfg: RunConfig, stats: RunStats) -> str:
    lines = [f"mode={cfg.mode}", f"footprint_metric={FOOTPRINT_METRIC}"] + stats.to_lines()
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[int, RunStats | None, str]:
    """Returns (exit code, stats, text to print)."""
    try:
        text = cfg.query_text if cfg.query_text is not None else Path(cfg.query_file).read_text()
        catalog = build_catalog(cfg.bindings)
        q = prepare_query(text, catalog, cfg.order)
        log.info("query: %s", q)
        _, stats = execute(q, catalog, cfg)
    except (OSError, ValueError, KeyError) as e:
        return 2, None, f"error: {e}\n"
    return 0, stats, format_stats(cfg, stats)
