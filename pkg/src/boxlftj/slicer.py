"""TrieArray slices: provisioning range-restricted copies and probing how
far a range may extend within a memory budget.

A slice of ``R`` at level ``k`` with prefix ``s`` and range ``[l, h]`` holds
the tuples of ``R`` that start with ``s`` and whose ``k``-th attribute lies
in ``[l, h]``.  Levels above ``k`` are one-element arrays holding the
prefix; from level ``k`` down the slice copies contiguous sub-ranges of the
backing arrays and remembers, per index array, the offset to subtract.

Footprint: copied words plus a 2-word header for every copied array.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Sequence

from .io_model import BlockReader
from .relation_store import NEG_INF, POS_INF, TrieArray
from .trie_iter import TrieIterator

HEADER_WORDS = 2


class _Spill:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "SPILL"

    def __reduce__(self):
        return (_Spill, ())


SPILL = _Spill()


class StoredRelation:
    """A TrieArray on (modelled) disk. Each array is its own file."""

    def __init__(self, name: str, trie: TrieArray):
        self.name = name
        self.trie = trie
        self.arity = trie.arity
        self.vals, self.idxs = trie.lists
        self.val_files = [(name, "val", j) for j in range(self.arity)]
        self.idx_files = [(name, "idx", j) for j in range(self.arity - 1)]

    def __repr__(self) -> str:
        return f"StoredRelation({self.name!r}, {len(self.trie)} tuples)"


def _as_stored(R) -> StoredRelation:
    return R if isinstance(R, StoredRelation) else StoredRelation("R", R)


def end_position(R: StoredRelation, k: int, pl: int, ghi: int, h: int,
                 reader: BlockReader | None = None) -> int:
    """Exclusive end of the values <= h, galloping from ``pl``."""
    if h >= POS_INF:
        return ghi
    return _gallop(reader, R.val_files[k], R.vals[k], h, pl, ghi, True)


def blocks(words: int, B: int) -> int:
    return -(-words // B)


def header_words(arity: int, k: int) -> int:
    """Header cost of a slice at level k: (a-k) value and (a-k-1) index arrays."""
    return HEADER_WORDS * (2 * (arity - k) - 1)


def empty_footprint(arity: int, k: int) -> int:
    # an empty slice still copies one entry from each index array
    return header_words(arity, k) + (arity - k - 1)


@dataclass
class TrieArraySlice:
    arity: int
    level: int
    prefix: tuple[int, ...]
    low: int
    high: int
    vals: list[list[int]]
    idxs: list[list[int]]
    offsets: list[int]
    data_words: int
    footprint_words: int
    source: str = ""

    def iterator(self) -> TrieIterator:
        return TrieIterator(self.vals, self.idxs, self.offsets)

    def blocks(self, B: int) -> int:
        return blocks(self.footprint_words, B)

    def tuples(self) -> list[tuple[int, ...]]:
        out = []
        a = self.arity

        def walk(j, lo, hi, pre):
            for p in range(lo, hi):
                t = pre + (self.vals[j][p],)
                if j == a - 1:
                    out.append(t)
                else:
                    off = self.offsets[j]
                    walk(j + 1, self.idxs[j][p] - off, self.idxs[j][p + 1] - off, t)

        walk(0, 0, len(self.vals[0]), ())
        return out

    def __len__(self) -> int:
        return len(self.vals[-1])


@dataclass
class MemoryBudget:
    """Words available plus what has been handed out, per dimension."""

    total_words: int
    block_size: int
    used_blocks: dict[int, int] = field(default_factory=dict)

    @property
    def total_blocks(self) -> int:
        return self.total_words // self.block_size

    def charge(self, dim: int, n_blocks: int) -> None:
        self.used_blocks[dim] = self.used_blocks.get(dim, 0) + n_blocks


# -- counted searches ----------------------------------------------------------

def _lower_bound(reader, file, arr, v, lo, hi) -> int:
    if reader is None:
        return bisect_left(arr, v, lo, hi)
    while lo < hi:
        mid = (lo + hi) // 2
        reader.touch(file, mid, True)
        if arr[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _upper_bound(reader, file, arr, v, lo, hi) -> int:
    if reader is None:
        return bisect_right(arr, v, lo, hi)
    while lo < hi:
        mid = (lo + hi) // 2
        reader.touch(file, mid, True)
        if arr[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _read(reader, file, arr, pos):
    if reader is not None:
        reader.touch(file, pos, True)
    return arr[pos]


def _gallop(reader, file, arr, v, lo, hi, strict: bool) -> int:
    """First position in [lo, hi) with arr[p] >= v (> v if strict), galloping
    forward from lo; cheap when the answer is near the start."""
    step = 1
    prev = lo
    while lo < hi:
        x = _read(reader, file, arr, lo)
        if (x > v) if strict else (x >= v):
            break
        prev = lo + 1
        lo += step
        step <<= 1
    hi = min(lo, hi)
    if strict:
        return _upper_bound(reader, file, arr, v, prev, hi)
    return _lower_bound(reader, file, arr, v, prev, hi)


def locate_prefix(R: StoredRelation, prefix: Sequence[int], reader: BlockReader | None = None):
    """Sibling group ``[lo, hi)`` in ``val_k`` (k = len(prefix)) under
    ``prefix``, or None if the prefix is absent."""
    lo, hi = 0, len(R.vals[0])
    for j, v in enumerate(prefix):
        arr = R.vals[j]
        p = _lower_bound(reader, R.val_files[j], arr, v, lo, hi)
        if p == hi or arr[p] != v:
            return None
        idx = R.idxs[j]
        lo = _read(reader, R.idx_files[j], idx, p)
        hi = _read(reader, R.idx_files[j], idx, p + 1)
    return lo, hi


# -- provisioning ----------------------------------------------------------------

def provision_group(R: StoredRelation, k: int, prefix: tuple[int, ...], group: tuple[int, int] | None,
                    l: int, h: int, reader: BlockReader | None = None,
                    lazy: bool = False, span: tuple[int, int] | None = None) -> TrieArraySlice:
    """Copy the part of sibling group ``group`` of ``val_k`` within ``[l, h]``
    and everything below it.  ``span`` gives the already known positions of
    ``[l, h]`` in ``val_k`` and skips the searches."""
    a = R.arity
    if group is None:
        glo = ghi = 0
    else:
        glo, ghi = group
    if span is not None:
        pl, ph = span
    else:
        pl = _lower_bound(reader, R.val_files[k], R.vals[k], l, glo, ghi)
        ph = _upper_bound(reader, R.val_files[k], R.vals[k], h, pl, ghi) if h < POS_INF else ghi
    copy = None if (reader is None or lazy) else reader.copy_range

    vals: list[list[int]] = []
    idxs: list[list[int]] = []
    offsets: list[int] = []
    c = ph - pl
    if c == 0:
        vals = [[] for _ in range(a)]
        idxs = [[0] for _ in range(a - 1)]
        offsets = [0] * (a - 1)
    else:
        for j in range(k):
            vals.append([prefix[j]])
            idxs.append([0, 1] if j < k - 1 else [0, c])
            offsets.append(0)
    data = 0
    s, e = pl, ph
    for j in range(k, a):
        if copy is not None:
            copy(R.val_files[j], s, e)
        data += e - s
        if c:
            vals.append(R.vals[j][s:e])
        if j == a - 1:
            break
        idx = R.idxs[j]
        if copy is not None:
            copy(R.idx_files[j], s, e + 1)
        data += e - s + 1
        ns, ne = idx[s], idx[e]
        if c:
            idxs.append(idx[s:e + 1])
            offsets.append(ns)
        s, e = ns, ne
    return TrieArraySlice(
        a, k, tuple(prefix), l, h, vals, idxs, offsets,
        data, data + header_words(a, k), R.name,
    )


def provision(R, k: int, s: Sequence[int], l: int, h: int,
              reader: BlockReader | None = None, lazy: bool = False) -> tuple[TrieArraySlice, int]:
    """Slice of R at level k under prefix s restricted to [l, h], plus its
    footprint in words.  An absent prefix yields an empty slice."""
    R = _as_stored(R)
    s = tuple(s)
    if len(s) != k or not 0 <= k < R.arity:
        raise ValueError(f"need len(prefix) == k < arity, got k={k}, prefix={s}")
    if l > h:
        raise ValueError(f"empty range [{l}, {h}]")
    group = locate_prefix(R, s, reader)
    sl = provision_group(R, k, s, group, l, h, reader, lazy)
    return sl, sl.footprint_words


# -- probing -------------------------------------------------------------------

@dataclass
class ProbeResult:
    high: object  # int or SPILL
    pos: int  # first position in val_k with value >= l
    present: bool  # val_k[pos] == l
    end: int  # exclusive end position of [l, high] in val_k


def probe_group(R: StoredRelation, k: int, group: tuple[int, int] | None, l: int,
                budget_words: int, reader: BlockReader | None = None,
                start: int | None = None) -> ProbeResult:
    """Probe within sibling group ``group`` of ``val_k``.  ``start`` is a
    position known to be <= the answer for ``l`` (the end of the previous
    range when ranges are walked in order); the search gallops from it."""
    a = R.arity
    glo, ghi = group if group is not None else (0, 0)
    valk = R.vals[k]
    if start is not None and glo <= start <= ghi:
        pl = _gallop(reader, R.val_files[k], valk, l, start, ghi, False)
    else:
        pl = _lower_bound(reader, R.val_files[k], valk, l, glo, ghi)
    present = pl < ghi and valk[pl] == l
    fixed = header_words(a, k)

    # start positions at every level below k
    starts = [pl]
    for j in range(k, a - 1):
        starts.append(_read(reader, R.idx_files[j], R.idxs[j], starts[-1]))

    def words(end: int) -> int:
        e = end
        w = fixed
        for j in range(k, a):
            sj = starts[j - k]
            w += e - sj
            if j < a - 1:
                w += e - sj + 1
                e = _read(reader, R.idx_files[j], R.idxs[j], e)
        return w

    if words(ghi) <= budget_words:
        return ProbeResult(POS_INF, pl, present, ghi)
    first = pl + 1 if present else pl
    if words(first) > budget_words:
        return ProbeResult(SPILL, pl, present, first)
    # largest end in [first, ghi) that fits; footprint is monotone in end
    lo, step = first, 1
    hi = ghi
    while lo + step < hi:
        if words(lo + step) <= budget_words:
            lo += step
            step <<= 1
        else:
            hi = lo + step
            break
    # fits at lo, fails at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if words(mid) <= budget_words:
            lo = mid
        else:
            hi = mid
    return ProbeResult(_read(reader, R.val_files[k], valk, lo) - 1, pl, present, lo)


def probe(R, k: int, s: Sequence[int], l: int, m: int, block_size: int = 1,
          reader: BlockReader | None = None):
    """Largest h >= l whose slice fits in ``m`` blocks of ``block_size`` words;
    POS_INF when the whole remainder fits; SPILL when not even ``[l, l]`` fits."""
    if m < 1:
        raise ValueError("probe needs m >= 1")
    R = _as_stored(R)
    group = locate_prefix(R, tuple(s), reader)
    return probe_group(R, k, group, l, m * block_size, reader).high


def slice_oracle(tuples: Sequence[tuple[int, ...]], k: int, s: Sequence[int], l: int, h: int):
    """Filter definition of a slice, for tests."""
    s = tuple(s)
    return [t for t in tuples if t[:k] == s and l <= t[k] <= h]


__all__ = [
    "SPILL", "NEG_INF", "POS_INF", "HEADER_WORDS", "StoredRelation", "TrieArraySlice",
    "MemoryBudget", "provision", "provision_group", "probe", "probe_group", "locate_prefix",
    "blocks", "header_words", "empty_footprint", "slice_oracle", "ProbeResult",
]
