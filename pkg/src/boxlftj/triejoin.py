"""Leapfrog Triejoin: one leapfrog join per variable, walked depth-first."""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .leapfrog import LeapfrogJoin
from .query import Query, QueryError
from .relation_store import NEG_INF, POS_INF, RelationCatalog
from .trie_iter import EqualIterator, TrieIterator


@dataclass
class AtomSource:
    """How the join reads one atom: a (sliced) trie or the Eq builtin."""

    vars: tuple[str, ...]
    vals: Sequence | None = None
    idxs: Sequence | None = None
    offsets: Sequence[int] | None = None

    @property
    def builtin(self) -> bool:
        return self.vals is None

    def iterator(self):
        if self.vals is None:
            return EqualIterator()
        return TrieIterator(self.vals, self.idxs, self.offsets)


@dataclass
class JoinPlan:
    order: tuple[str, ...]
    head: tuple[str, ...]
    atoms: list[AtomSource]
    participants: list[list[int]] = field(init=False)

    def __post_init__(self):
        pos = {v: i for i, v in enumerate(self.order)}
        self.participants = [[] for _ in self.order]
        for a_i, atom in enumerate(self.atoms):
            ps = [pos[v] for v in atom.vars]
            if ps != sorted(ps):
                raise QueryError(f"atom over {atom.vars} is not a subsequence of the key order")
            for p in ps:
                self.participants[p].append(a_i)
        for d, group in enumerate(self.participants):
            # Eq at its first variable ranges over the whole domain
            bounded = [
                a for a in group if not (self.atoms[a].builtin and pos[self.atoms[a].vars[0]] == d)
            ]
            if not bounded:
                raise QueryError(f"variable {self.order[d]!r} is not bound by any stored relation")
        self.head_positions = tuple(pos[v] for v in self.head)

    @property
    def n(self) -> int:
        return len(self.order)


def plan_from_catalog(q: Query, catalog: RelationCatalog) -> JoinPlan:
    """Plan over whole in-memory relations; ``q`` must be normalized."""
    atoms = []
    for atom in q.atoms:
        if atom.builtin:
            atoms.append(AtomSource(atom.vars))
            continue
        if atom.relation not in catalog.relations:
            raise QueryError(f"no relation bound for {atom.relation!r}")
        trie = catalog.index(atom.relation, atom.permutation)
        vals, idxs = trie.lists
        atoms.append(AtomSource(atom.vars, vals, idxs))
    return JoinPlan(q.order, q.head, atoms)


class ResultSink:
    """Count or list result bindings.

    In list mode tuples pass through an append-only buffer of one block
    (``block_size`` words); every flush counts as one output block write and,
    if ``out`` is given, appends the rows to that CSV file.
    """

    def __init__(self, mode: str = "count", out=None, block_size: int | None = None,
                 keep: bool = True):
        if mode not in ("count", "list"):
            raise ValueError(f"unknown sink mode {mode!r}")
        self.mode = mode
        self.count = 0
        self._out: list[tuple[int, ...]] = []
        self.keep = keep
        self.block_size = block_size
        self.output_block_writes = 0
        self.iterator_ops = 0
        self.comparisons = 0
        self._buf: list[tuple[int, ...]] = []
        self._cap = None
        self._fh = None
        self._writer = None
        if out is not None:
            self._fh = open(out, "w", newline="")
            self._writer = csv.writer(self._fh, lineterminator="\n")

    def emit(self, t: tuple[int, ...]) -> None:
        self.count += 1
        if self.mode == "count":
            return
        if self._cap is None:
            self._cap = max(1, (self.block_size or 1024) // max(1, len(t)))
        self._buf.append(t)
        if len(self._buf) >= self._cap:
            self.flush()

    def add_count(self, c: int) -> None:
        self.count += c

    def flush(self) -> None:
        if not self._buf:
            return
        self.output_block_writes += 1
        if self.keep:
            self._out.extend(self._buf)
        if self._writer is not None:
            self._writer.writerows(self._buf)
        self._buf = []

    def close(self) -> None:
        self.flush()
        if self._fh is not None:
            self._fh.close()
            self._fh = None
            self._writer = None

    @property
    def tuples(self) -> list[tuple[int, ...]]:
        """Kept results so far, including those still in the buffer."""
        return self._out + self._buf

    def result_set(self) -> set[tuple[int, ...]]:
        return set(self.tuples)


def lftj_run(plan: JoinPlan, sink: ResultSink, first_range: tuple[int, int] | None = None) -> ResultSink:
    """Enumerate every binding of ``plan`` into ``sink`` in key order.

    ``first_range=(lo, hi)`` restricts the first variable to ``[lo, hi]``;
    that is how the parallel mode carves up the work.
    """
    iters = [a.iterator() for a in plan.atoms]
    n = plan.n
    groups = [[iters[j] for j in plan.participants[d]] for d in range(n)]
    lfs = [LeapfrogJoin(g) for g in groups]
    binding = [0] * n
    head_idx = plan.head_positions
    counting = sink.mode == "count"
    emit = sink.emit
    lo, hi = first_range if first_range is not None else (NEG_INF, POS_INF)
    last = n - 1

    def walk(d: int) -> int:
        found = 0
        group = groups[d]
        for it in group:
            it.open()
        lf = lfs[d]
        lf.init()
        limit = POS_INF
        if d == 0:
            limit = hi
            if not lf.at_end() and lf.value() < lo:
                lf.seek(lo)
        while not lf.at_end():
            v = lf.value()
            if v > limit:
                break
            if d == last:
                if counting:
                    found += 1
                else:
                    binding[d] = v
                    emit(tuple(binding[i] for i in head_idx))
            else:
                binding[d] = v
                found += walk(d + 1)
            lf.next()
        for it in group:
            it.close()
        return found

    total = walk(0)
    if counting:
        sink.add_count(total)
    sink.iterator_ops += sum(it.ops for it in iters)
    sink.comparisons += sum(it.comparisons for it in iters)
    return sink


def lftj_on_box(plan: JoinPlan, sink: ResultSink) -> ResultSink:
    """Run over a plan whose sources are slices provisioned for one box.

    The slices hold no data outside the box, so no filtering is needed.
    """
    return lftj_run(plan, sink)


def split_first_range(plan: JoinPlan, width: int) -> list[tuple[int, int]]:
    """Cut the first variable's domain into ``width`` disjoint ranges with
    roughly equal numbers of candidate values."""
    cands = None
    for a in plan.participants[0]:
        src = plan.atoms[a]
        if not src.builtin and (cands is None or len(src.vals[0]) < len(cands)):
            cands = src.vals[0]
    cands = list(cands) if cands is not None else []
    if width <= 1 or len(cands) < 2:
        return [(NEG_INF, POS_INF)]
    width = min(width, len(cands))
    cuts = sorted({cands[(len(cands) * i) // width] for i in range(1, width)})
    edges = [NEG_INF] + cuts
    return [(edges[i], (edges[i + 1] - 1) if i + 1 < len(edges) else POS_INF) for i in range(len(edges))]


def _run_range(args):
    plan, mode, rng = args
    sink = ResultSink(mode)
    lftj_run(plan, sink, rng)
    sink.flush()
    return sink.count, sink.tuples, sink.iterator_ops, sink.comparisons


def lftj_parallel(plan: JoinPlan, sink: ResultSink, width: int) -> ResultSink:
    """Data-parallel LFTJ over disjoint first-variable ranges (processes).

    Results are merged in range order, so list output matches the
    sequential run exactly.
    """
    ranges = split_first_range(plan, width)
    if len(ranges) == 1:
        return lftj_run(plan, sink)
    for src in plan.atoms:
        if src.vals is not None and not isinstance(src.vals[0], list):
            raise ValueError("parallel mode needs plain in-memory arrays (no I/O simulation)")
    with ProcessPoolExecutor(max_workers=len(ranges)) as ex:
        parts = list(ex.map(_run_range, [(plan, sink.mode, r) for r in ranges]))
    for count, tuples, ops, comps in parts:
        if sink.mode == "count":
            sink.add_count(count)
        else:
            for t in tuples:
                sink.emit(t)
        sink.iterator_ops += ops
        sink.comparisons += comps
    return sink
