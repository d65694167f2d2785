"""(M, B) external-memory cost model.

Every array of every stored relation is treated as its own file, cut into
blocks of ``B`` words; a block is identified by ``(file, block_index)``.
Two accounting schemes are provided:

* :class:`BlockModel` - an LRU buffer pool of ``floor(M / B)`` frames, used
  for vanilla (unboxed) runs where the join touches stored data directly.
* :class:`BlockReader` - explicit counted reads for probing/provisioning in
  boxed runs, with a one-block-per-array boundary cache.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, fields
from typing import Hashable, Sequence


@dataclass
class RunStats:
    boxes: int = 0
    spills: int = 0
    probes: int = 0
    provisioned_words: int = 0
    probe_block_reads: int = 0
    provision_block_reads: int = 0
    lru_block_loads: int = 0
    lru_evictions: int = 0
    skipped_boxes: int = 0
    output_block_writes: int = 0
    iterator_ops: int = 0
    output_count: int = 0

    @property
    def block_reads(self) -> int:
        return self.probe_block_reads + self.provision_block_reads

    def to_lines(self) -> list[str]:
        return [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]

    def format(self) -> str:
        return "\n".join(self.to_lines()) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RunStats":
        known = {f.name for f in fields(cls)}
        kw = {}
        for line in text.splitlines():
            if "=" not in line:
                continue
            k, v = line.split("=", 1)
            if k in known:
                kw[k] = int(v)
        return cls(**kw)


class BlockModel:
    """LRU buffer pool over ``floor(M / B)`` frames."""

    def __init__(self, memory_words: int, block_size: int):
        if block_size < 1 or memory_words < block_size:
            raise ValueError("need block_size >= 1 and memory_words >= block_size")
        self.B = block_size
        self.M = memory_words
        self.frames = memory_words // block_size
        self._resident: OrderedDict[tuple[Hashable, int], None] = OrderedDict()
        self.loads = 0
        self.evictions = 0

    def access(self, file: Hashable, block: int) -> bool:
        """Touch a block; returns True on a hit, False on a miss (load)."""
        key = (file, block)
        res = self._resident
        if key in res:
            res.move_to_end(key)
            return True
        self.loads += 1
        if len(res) >= self.frames:
            res.popitem(last=False)
            self.evictions += 1
        res[key] = None
        return False

    def access_word(self, file: Hashable, pos: int) -> bool:
        return self.access(file, pos // self.B)

    @property
    def resident(self) -> int:
        return len(self._resident)


# Alias matching the operation name used elsewhere.
def lru_access(model: BlockModel, file: Hashable, block: int) -> bool:
    return model.access(file, block)


class ChargedArray(Sequence):
    """Read-only list view whose every element access is charged to a BlockModel."""

    __slots__ = ("_data", "_file", "_model", "_B")

    def __init__(self, data: list[int], file: Hashable, model: BlockModel):
        self._data = data
        self._file = file
        self._model = model
        self._B = model.B

    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            raise TypeError("ChargedArray does not support slicing")
        if i < 0:
            i += len(self._data)
        self._model.access(self._file, i // self._B)
        return self._data[i]


class BlockReader:
    """Counted block reads with a last-block cache per array.

    Keeping the block that held the previous read (in particular the block
    containing the last copied element of a slice) lets the next provision,
    which resumes at the successor of the old upper bound, reuse it instead
    of reading it again.
    """

    def __init__(self, block_size: int, stats: RunStats):
        self.B = block_size
        self.stats = stats
        self._last: dict[Hashable, int] = {}

    def touch(self, file: Hashable, pos: int, probe: bool) -> None:
        b = pos // self.B
        if self._last.get(file) == b:
            return
        self._last[file] = b
        if probe:
            self.stats.probe_block_reads += 1
        else:
            self.stats.provision_block_reads += 1

    def read(self, file: Hashable, arr: Sequence[int], pos: int, probe: bool) -> int:
        self.touch(file, pos, probe)
        return arr[pos]

    def copy_range(self, file: Hashable, lo: int, hi: int) -> None:
        """Charge a sequential copy of positions ``[lo, hi)``."""
        if hi <= lo:
            return
        first, last = lo // self.B, (hi - 1) // self.B
        n = last - first + 1
        if self._last.get(file) == first:
            n -= 1
        self.stats.provision_block_reads += n
        self._last[file] = last


def gen_pathological(N: int, M: int, B: int) -> list[tuple[int, int]]:
    """Edges ``(x, N - B * (x mod T))`` for ``x = 0..N`` with ``T = M/B + 1``.

    Second-column values are spaced ``B`` apart and repeat with period ``T``,
    one more than the number of frames, which defeats an LRU pool.
    """
    if B < 1 or M < B or M % B:
        raise ValueError("need B >= 1 and M a positive multiple of B")
    if N < M + B:
        raise ValueError("need N >= M + B")
    T = M // B + 1
    return [(x, N - B * (x % T)) for x in range(N + 1)]
