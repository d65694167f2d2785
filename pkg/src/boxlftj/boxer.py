"""Boxing: partition the binding space into boxes whose input slices fit
in memory, and run the triejoin box by box.

Dimension ``i`` (the ``i``-th variable of the key order) owns the atoms
whose first variable it is.  ``box_up(i)`` walks ``low_i`` from -inf:
probe each source for the largest ``high_i`` that fits its share of the
memory, provision the slices for ``[low_i, high_i]``, recurse into
dimension ``i + 1``, then continue from ``high_i + 1``.  At the last
dimension the join runs over the current slice of every atom.

A source that cannot fit even a single value ``a`` *spills*: ``high_i`` is
pinned to ``a`` and the atom is re-probed, under prefix ``(.., a)``, at the
dimension of its next variable, carrying the share of memory it was given.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .io_model import BlockReader, RunStats
from .query import Query, apply_indexes, rewrite_repeated_vars
from .relation_store import NEG_INF, POS_INF, RelationCatalog
from .slicer import (
    SPILL,
    StoredRelation,
    TrieArraySlice,
    blocks,
    empty_footprint,
    end_position,
    probe_group,
    provision_group,
)
from .triejoin import AtomSource, JoinPlan, ResultSink, lftj_parallel, lftj_run


class InfeasibleBudget(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    low: tuple[int, ...]
    high: tuple[int, ...]

    def contains(self, point) -> bool:
        return all(l <= v <= h for l, v, h in zip(self.low, point, self.high))

    def overlaps(self, other: "Box") -> bool:
        return all(a <= d and c <= b for a, b, c, d in zip(self.low, self.high, other.low, other.high))


@dataclass
class BoxingConfig:
    memory_words: int
    block_size: int
    ratio: tuple[int, ...] | None = None
    constraint_hook: bool = False
    lazy: bool = False
    parallel: int = 1
    # None: one block when listing results, none when only counting
    output_buffer_blocks: int | None = None
    record_boxes: bool = True

    def total_blocks(self, sink_mode: str = "list") -> int:
        ob = self.output_buffer_blocks
        if ob is None:
            ob = 1 if sink_mode == "list" else 0
        return self.memory_words // self.block_size - ob


@dataclass
class Source:
    """One probe/provision stream: a relation (or, after a spill, the
    sub-trie under a fixed prefix) read at ``level`` for dimension ``dim``.

    Spill entries are Sources with ``mem`` set to the carried blocks.
    """

    rel: StoredRelation
    atoms: list[int]
    level: int
    prefix: tuple[int, ...]
    group: tuple[int, int] | None
    dim: int
    reader: BlockReader
    mem: int = 0


SpillEntry = Source


@dataclass
class BoxingState:
    query: Query
    config: BoxingConfig
    preds: list[list[Source]]
    budget: list[int]
    stats: RunStats
    sink: ResultSink
    low: list[int]
    high: list[int]
    slices: dict[int, TrieArraySlice] = field(default_factory=dict)
    boxes: list[Box] = field(default_factory=list)
    skipped: list[Box] = field(default_factory=list)
    constraints: dict[int, list[int]] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.query.rank


def assign_budgets(query: Query, total_blocks: int, ratio=None) -> list[int]:
    """Split memory over the dimensions that own atoms.

    Even split by default, the remainder going to the first owning
    dimension; ``ratio`` (e.g. ``(4, 1)``) weights the owning dimensions in
    key order.  Dimensions owning no atom get nothing.
    """
    owning = [i for i, group in enumerate(query.preds()) if group]
    if total_blocks < len(owning):
        raise InfeasibleBudget(f"{total_blocks} blocks cannot cover {len(owning)} dimensions")
    if ratio is None:
        ratio = (1,) * len(owning)
    ratio = tuple(int(r) for r in ratio)
    if len(ratio) != len(owning) or any(r <= 0 for r in ratio):
        raise ValueError(f"ratio {ratio} must give one positive weight per owning dimension ({len(owning)})")
    s = sum(ratio)
    shares = [total_blocks * r // s for r in ratio]
    shares[0] += total_blocks - sum(shares)
    out = [0] * query.n
    for i, b in zip(owning, shares):
        out[i] = b
    return out


def parse_ratio(text: str | None):
    if text is None or text == "":
        return None
    try:
        return tuple(int(p) for p in text.split(":"))
    except ValueError:
        raise ValueError(f"bad ratio {text!r}; expected e.g. 4:1") from None


def _split(total: int, parts: int) -> list[int]:
    base = total // parts
    out = [base] * parts
    out[0] += total - base * parts
    return out


def constraint_skip_hook(state: BoxingState, i: int) -> bool:
    """True if the box prefix up to dimension ``i`` violates a declared
    ``x < y`` constraint (``high_y < low_x``) and can be skipped."""
    for j in state.constraints.get(i, ()):
        if state.high[i] < state.low[j]:
            return True
    return False


def handle_spill(state: BoxingState, src: Source, i: int, a: int, pos: int, share: int) -> list[Source]:
    """Turn a source that spilled at value ``a`` into one entry per atom,
    each to be probed at the dimension of that atom's next variable."""
    rel = src.rel
    k = src.level
    if k == rel.arity - 1:
        raise InfeasibleBudget("budget too small for one block")
    state.stats.spills += 1
    idx = rel.idxs[k]
    reader = src.reader
    reader.touch(rel.idx_files[k], pos, True)
    reader.touch(rel.idx_files[k], pos + 1, True)
    group = (idx[pos], idx[pos + 1])
    q = state.query
    out = []
    for atom_i, mem in zip(src.atoms, _split(share, len(src.atoms))):
        nxt = q.atoms[atom_i].vars[k + 1]
        out.append(Source(
            rel, [atom_i], k + 1, src.prefix + (a,), group, q.dim(nxt),
            BlockReader(reader.B, state.stats), mem,
        ))
    return out


def box_up(state: BoxingState, i: int, leftover: int, pending: list[Source]) -> None:
    q = state.query
    n = q.n
    cfg = state.config
    B = cfg.block_size
    stats = state.stats
    low, high = state.low, state.high

    here = [e for e in pending if e.dim == i]
    passing = [e for e in pending if e.dim > i]
    srcs = state.preds[i] + here
    mem = state.budget[i] + leftover + sum(e.mem for e in here)

    low[i] = NEG_INF
    # per source: position in val_k where the previous range ended
    starts: list[int | None] = [None] * len(srcs)
    while True:
        spills: list[Source] = []
        used = reserved = 0
        skip = False
        if not srcs:
            high[i] = POS_INF
        else:
            share = mem // len(srcs)
            results = []
            for j, src in enumerate(srcs):
                stats.probes += 1
                r = probe_group(src.rel, src.level, src.group, low[i], share * B,
                                src.reader, starts[j])
                if r.high is SPILL and not r.present:
                    # not even the empty slice fits
                    raise InfeasibleBudget(
                        f"per-source budget of {share} blocks cannot hold a slice header"
                    )
                results.append(r)
            spilled = [(s, r) for s, r in zip(srcs, results) if r.high is SPILL]
            high[i] = low[i] if spilled else min(r.high for r in results)
            spans = []
            for j, (src, r) in enumerate(zip(srcs, results)):
                if r.high is SPILL or r.high == high[i]:
                    spans.append((r.pos, r.end))
                else:
                    ghi = src.group[1] if src.group else 0
                    spans.append((r.pos, end_position(src.rel, src.level, r.pos, ghi,
                                                      high[i], src.reader)))
                starts[j] = spans[-1][1]
            if cfg.constraint_hook and constraint_skip_hook(state, i):
                skip = True
                stats.skipped_boxes += 1
                if cfg.record_boxes:
                    state.skipped.append(Box(
                        tuple(low[:i + 1]) + (NEG_INF,) * (n - i - 1),
                        tuple(high[:i + 1]) + (POS_INF,) * (n - i - 1),
                    ))
            else:
                for src, r, span in zip(srcs, results, spans):
                    if r.high is SPILL:
                        continue
                    sl = provision_group(src.rel, src.level, src.prefix, src.group,
                                         low[i], high[i], src.reader, cfg.lazy, span)
                    used += sl.blocks(B)
                    stats.provisioned_words += sl.data_words
                    for a in src.atoms:
                        state.slices[a] = sl
                for src, r in spilled:
                    spills.extend(handle_spill(state, src, i, low[i], r.pos, share))
                    reserved += share
        if not skip:
            if i < n - 1:
                box_up(state, i + 1, mem - used - reserved, passing + spills)
            else:
                run_box(state)
        if high[i] == POS_INF:
            break
        low[i] = high[i] + 1


def run_box(state: BoxingState) -> None:
    q = state.query
    state.stats.boxes += 1
    if state.config.record_boxes:
        state.boxes.append(Box(tuple(state.low), tuple(state.high)))
    atoms = []
    for a_i, atom in enumerate(q.atoms):
        if atom.builtin:
            atoms.append(AtomSource(atom.vars))
        else:
            sl = state.slices[a_i]
            atoms.append(AtomSource(atom.vars, sl.vals, sl.idxs, sl.offsets))
    plan = JoinPlan(q.order, q.head, atoms)
    if state.config.parallel > 1:
        lftj_parallel(plan, state.sink, state.config.parallel)
    else:
        lftj_run(plan, state.sink)


def stored_relations(q: Query, catalog: RelationCatalog) -> dict[tuple[str, tuple[int, ...]], StoredRelation]:
    out = {}
    for atom in q.atoms:
        if atom.builtin:
            continue
        key = (atom.relation, atom.permutation)
        if key not in out:
            trie = catalog.index(*key)
            ident = atom.permutation == tuple(range(len(atom.permutation)))
            name = atom.relation if ident else f"{atom.relation}_{''.join(str(p + 1) for p in atom.permutation)}"
            out[key] = StoredRelation(name, trie)
    return out


def prepare(q: Query, catalog: RelationCatalog, config: BoxingConfig, sink: ResultSink,
            stats: RunStats | None = None) -> BoxingState:
    if q.atoms and q.atoms[0].permutation is None:
        q = apply_indexes(rewrite_repeated_vars(q))
    if config.block_size < 1:
        raise InfeasibleBudget("block size must be positive")
    stats = stats if stats is not None else RunStats()
    rels = stored_relations(q, catalog)

    # one source per (dimension, backing index); atoms on it share slices
    preds: list[list[Source]] = [[] for _ in range(q.n)]
    for i, group in enumerate(q.preds()):
        by_rel: dict = {}
        for a_i in group:
            atom = q.atoms[a_i]
            if atom.builtin:
                continue
            key = (atom.relation, atom.permutation)
            if key in by_rel:
                by_rel[key].atoms.append(a_i)
                continue
            rel = rels[key]
            src = Source(rel, [a_i], 0, (), (0, len(rel.vals[0])), i,
                         BlockReader(config.block_size, stats))
            by_rel[key] = src
            preds[i].append(src)

    budget = assign_budgets(q, config.total_blocks(sink.mode), config.ratio)
    for i, srcs in enumerate(preds):
        if not srcs:
            continue
        share = budget[i] // len(srcs)
        need = max(blocks(empty_footprint(s.rel.arity, 0), config.block_size) for s in srcs)
        if share < need:
            raise InfeasibleBudget(
                f"dimension {q.order[i]} gets {share} blocks per source, needs at least {need}"
            )

    constraints: dict[int, list[int]] = {}
    for x, y in q.less_than:
        dx, dy = q.dim(x), q.dim(y)
        if dx < dy:
            constraints.setdefault(dy, []).append(dx)
    n = q.n
    return BoxingState(q, config, preds, budget, stats, sink,
                       [NEG_INF] * n, [POS_INF] * n, constraints=constraints)


def run_boxed(q: Query, catalog: RelationCatalog, config: BoxingConfig,
              sink: ResultSink | None = None) -> tuple[ResultSink, RunStats, BoxingState]:
    """Boxed LFTJ over the relations in ``catalog``."""
    sink = sink if sink is not None else ResultSink("count", block_size=config.block_size)
    state = prepare(q, catalog, config, sink)
    box_up(state, 0, 0, [])
    sink.flush()
    stats = state.stats
    stats.output_count = sink.count
    stats.output_block_writes = sink.output_block_writes
    stats.iterator_ops = sink.iterator_ops
    return sink, stats, state


def check_partition(boxes: list[Box]) -> bool:
    """Pairwise disjointness (quadratic; for tests on small runs)."""
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if boxes[i].overlaps(boxes[j]):
                return False
    return True
