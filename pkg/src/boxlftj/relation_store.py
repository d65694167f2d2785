"""TrieArray encoding of sorted relations, CSV ingestion and the on-disk format.

A TrieArray for an ``a``-ary relation holds ``a`` value arrays and ``a - 1``
index arrays.  The children of the node stored at ``val[i][j]`` live in
``val[i + 1][idx[i][j]:idx[i][j + 1]]`` (half-open), so ``len(idx[i]) ==
len(val[i]) + 1``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAGIC = b"TARR"
FORMAT_VERSION = 1

# Sentinels for open interval bounds; never valid data values.
NEG_INF = -(2**63)
POS_INF = 2**63 - 1


class RelationError(ValueError):
    """Bad input data: unsorted tuples, wrong arity, unparsable CSV."""


class TrieArrayFormatError(ValueError):
    """A persisted TrieArray file is malformed."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True, eq=False)
class TrieArray:
    arity: int
    vals: tuple[np.ndarray, ...]
    idxs: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise RelationError("arity must be positive")
        if len(self.vals) != self.arity or len(self.idxs) != self.arity - 1:
            raise RelationError("array count does not match arity")

    def __len__(self) -> int:
        return len(self.vals[-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrieArray) or other.arity != self.arity:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.vals, other.vals)) and all(
            np.array_equal(a, b) for a, b in zip(self.idxs, other.idxs)
        )

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def lists(self) -> tuple[list[list[int]], list[list[int]]]:
        """Plain-list copies of the arrays; element access on lists is much
        cheaper than on numpy arrays in the join's inner loops."""
        return [v.tolist() for v in self.vals], [i.tolist() for i in self.idxs]

    @property
    def total_words(self) -> int:
        return sum(len(v) for v in self.vals) + sum(len(i) for i in self.idxs)

    def arrays(self) -> list[np.ndarray]:
        """Arrays in storage order: val_0, idx_0, val_1, ..., val_{a-1}."""
        out = []
        for i in range(self.arity):
            out.append(self.vals[i])
            if i < self.arity - 1:
                out.append(self.idxs[i])
        return out

    def tuples(self) -> list[tuple[int, ...]]:
        return enumerate_tuples(self)


def _check_tuple(t, arity: int, pos: int) -> tuple[int, ...]:
    t = tuple(t)
    if len(t) != arity:
        raise RelationError(f"tuple {pos} has arity {len(t)}, expected {arity}")
    return t


def build_from_sorted(tuples: Iterable[Sequence[int]], arity: int) -> TrieArray:
    """Build a TrieArray from lexicographically sorted, duplicate-free tuples.

    Pass 1 validates the order and sizes every array; pass 2 fills them.
    """
    if arity < 1:
        raise RelationError("arity must be positive")
    if not isinstance(tuples, Sequence):
        tuples = list(tuples)

    # pass 1: sizes
    counts = [0] * arity
    prev = None
    for pos, t in enumerate(tuples):
        t = _check_tuple(t, arity, pos)
        if prev is None:
            level = 0
        else:
            if t <= prev:
                kind = "duplicate" if t == prev else "unsorted"
                raise RelationError(f"{kind} tuple at position {pos}: {t} after {prev}")
            level = next(i for i in range(arity) if t[i] != prev[i])
        for i in range(level, arity):
            counts[i] += 1
        prev = t

    vals = [np.empty(c, dtype=np.int64) for c in counts]
    idxs = [np.empty(c + 1, dtype=np.int64) for c in counts[:-1]]

    # pass 2: fill
    fill = [0] * arity
    prev = None
    for t in tuples:
        t = tuple(t)
        level = 0 if prev is None else next(i for i in range(arity) if t[i] != prev[i])
        for i in range(level, arity):
            if i < arity - 1:
                idxs[i][fill[i]] = fill[i + 1]
            vals[i][fill[i]] = t[i]
            fill[i] += 1
        prev = t
    for i in range(arity - 1):
        idxs[i][counts[i]] = counts[i + 1]
    return TrieArray(arity, tuple(vals), tuple(idxs))


def enumerate_tuples(t: TrieArray) -> list[tuple[int, ...]]:
    vals, idxs = t.lists
    out: list[tuple[int, ...]] = []
    a = t.arity

    def walk(level: int, lo: int, hi: int, prefix: tuple[int, ...]):
        col = vals[level]
        if level == a - 1:
            out.extend(prefix + (col[j],) for j in range(lo, hi))
            return
        idx = idxs[level]
        for j in range(lo, hi):
            walk(level + 1, idx[j], idx[j + 1], prefix + (col[j],))

    walk(0, 0, len(vals[0]), ())
    return out


def ingest_csv(
    path, arity: int, dedup: bool = True, symmetrize_min_max: bool = False
) -> list[tuple[int, ...]]:
    """Read integer rows from a CSV file and return them sorted.

    With ``symmetrize_min_max`` (binary relations only) every edge {a, b},
    a != b, becomes (min, max) and self-loops are dropped.
    """
    if symmetrize_min_max and arity != 2:
        raise RelationError("symmetrize_min_max requires arity 2")
    rows: list[tuple[int, ...]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != arity:
                raise RelationError(f"line {lineno}: expected {arity} fields, got {len(fields)}")
            try:
                row = tuple(int(f) for f in fields)
            except ValueError:
                raise RelationError(f"line {lineno}: non-integer field in {line!r}") from None
            if any(v <= NEG_INF or v >= POS_INF for v in row):
                raise RelationError(f"line {lineno}: value outside the data domain")
            if symmetrize_min_max:
                a, b = row
                if a == b:
                    continue
                row = (a, b) if a < b else (b, a)
            rows.append(row)
    return sort_tuples(rows, dedup=dedup)


def sort_tuples(rows: Iterable[tuple[int, ...]], dedup: bool = True) -> list[tuple[int, ...]]:
    # In-memory sort; the only place where an external merge sort would plug in.
    if dedup:
        return sorted(set(rows))
    return sorted(rows)


def write_csv(path, tuples: Iterable[Sequence[int]]) -> None:
    with open(path, "w") as fh:
        for t in tuples:
            fh.write(",".join(str(v) for v in t))
            fh.write("\n")


def make_alternative_index(base: Iterable[Sequence[int]], permutation: Sequence[int]) -> TrieArray:
    """TrieArray of ``{(t[p[0]], t[p[1]], ...) | t in base}`` (0-based permutation)."""
    perm = tuple(permutation)
    if sorted(perm) != list(range(len(perm))):
        raise RelationError(f"not a permutation: {perm}")
    rows = [tuple(t[p] for p in perm) for t in base]
    return build_from_sorted(sort_tuples(rows), len(perm))


@dataclass(frozen=True)
class RelationCatalogEntry:
    name: str
    arity: int
    permutation: tuple[int, ...]
    storage_path: str | None = None

    def __post_init__(self):
        if sorted(self.permutation) != list(range(self.arity)):
            raise RelationError(f"{self.name}: permutation {self.permutation} is not a bijection")


@dataclass
class RelationCatalog:
    """Named base relations plus lazily derived alternative indexes."""

    relations: dict[str, TrieArray] = field(default_factory=dict)
    paths: dict[str, str] = field(default_factory=dict)
    _indexes: dict[tuple[str, tuple[int, ...]], TrieArray] = field(default_factory=dict)

    def add(self, name: str, trie: TrieArray, path: str | None = None):
        self.relations[name] = trie
        if path is not None:
            self.paths[name] = path

    def arity(self, name: str) -> int:
        return self.relations[name].arity

    def arities(self) -> dict[str, int]:
        return {name: t.arity for name, t in self.relations.items()}

    def index(self, name: str, permutation: Sequence[int]) -> TrieArray:
        perm = tuple(permutation)
        base = self.relations[name]
        if perm == tuple(range(base.arity)):
            return base
        key = (name, perm)
        if key not in self._indexes:
            self._indexes[key] = make_alternative_index(base.tuples(), perm)
        return self._indexes[key]

    def entries(self) -> list[RelationCatalogEntry]:
        out = [
            RelationCatalogEntry(n, t.arity, tuple(range(t.arity)), self.paths.get(n))
            for n, t in self.relations.items()
        ]
        out += [
            RelationCatalogEntry(n, len(p), p, None) for (n, p) in self._indexes
        ]
        return out


# -- persistence ------------------------------------------------------------

_HEADER = struct.Struct("<4sII")


def persist(t: TrieArray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, t.arity))
        fh.write(struct.pack(f"<{t.arity}Q", *(len(v) for v in t.vals)))
        if t.arity > 1:
            fh.write(struct.pack(f"<{t.arity - 1}Q", *(len(i) for i in t.idxs)))
        for arr in t.arrays():
            fh.write(np.ascontiguousarray(arr, dtype="<i8").tobytes())


def load(path) -> TrieArray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TrieArrayFormatError("header", "truncated")
    magic, version, arity = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise TrieArrayFormatError("magic", "bad magic")
    if version != FORMAT_VERSION:
        raise TrieArrayFormatError("version", f"unsupported version {version}")
    if arity < 1:
        raise TrieArrayFormatError("arity", "arity must be positive")
    off = _HEADER.size
    need = off + 8 * (2 * arity - 1)
    if len(data) < need:
        raise TrieArrayFormatError("lengths", "truncated")
    val_lens = struct.unpack_from(f"<{arity}Q", data, off)
    off += 8 * arity
    idx_lens = struct.unpack_from(f"<{arity - 1}Q", data, off) if arity > 1 else ()
    off += 8 * (arity - 1)
    if len(data) != off + 8 * (sum(val_lens) + sum(idx_lens)):
        raise TrieArrayFormatError("arrays", "file size does not match declared lengths")

    vals, idxs = [], []
    for i in range(arity):
        vals.append(np.frombuffer(data, dtype="<i8", count=val_lens[i], offset=off).astype(np.int64))
        off += 8 * val_lens[i]
        if i < arity - 1:
            idxs.append(np.frombuffer(data, dtype="<i8", count=idx_lens[i], offset=off).astype(np.int64))
            off += 8 * idx_lens[i]
    t = TrieArray(arity, tuple(vals), tuple(idxs))
    validate(t)
    return t


def validate(t: TrieArray) -> None:
    """Check the structural invariants; raise TrieArrayFormatError naming the array."""
    for i, idx in enumerate(t.idxs):
        name = f"idx_{i}"
        if len(idx) != len(t.vals[i]) + 1:
            raise TrieArrayFormatError(name, "length must be len(val_%d) + 1" % i)
        if idx[0] != 0:
            raise TrieArrayFormatError(name, "first entry must be 0")
        if idx[-1] != len(t.vals[i + 1]):
            raise TrieArrayFormatError(name, f"invariant violation: last entry {idx[-1]} != len(val_{i + 1})")
        if np.any(np.diff(idx) < 1):
            raise TrieArrayFormatError(name, "invariant violation: entries must strictly increase")
    for i, val in enumerate(t.vals):
        # sibling groups must be strictly increasing
        bounds = t.idxs[i - 1] if i > 0 else np.array([0, len(val)])
        d = np.diff(val)
        if len(d):
            starts = np.zeros(len(val), dtype=bool)
            starts[bounds[:-1][bounds[:-1] < len(val)]] = True
            if np.any((d <= 0) & ~starts[1:]):
                raise TrieArrayFormatError(f"val_{i}", "invariant violation: siblings not increasing")
