"""TrieIterator navigation over (sliced) TrieArrays.

The iterator is a pointer into the trie.  ``open``/``close`` move between
levels; ``next``/``seek``/``at_end``/``value`` form the linear-iterator
interface over the current sibling group.
"""
from __future__ import annotations

from bisect import bisect_left
from typing import Sequence

from .relation_store import NEG_INF, POS_INF, TrieArray


class ContractViolation(RuntimeError):
    """Illegal call sequence on an iterator (a programming error, not bad data)."""


class TrieIterator:
    """Iterator over value/index arrays.

    ``offsets[i]`` is subtracted from every entry read from ``idxs[i]``; this
    is how slices address their copied sub-arrays without rewriting them.
    Arrays may be plain lists or :class:`~boxlftj.io_model.ChargedArray`.

    ``comparisons`` counts value comparisons made by ``seek`` (the bisect
    phase is charged its worst case, ``bit_length`` of the range), ``ops``
    counts navigation calls.
    """

    __slots__ = (
        "_vals", "_idxs", "_offs", "arity", "depth", "_stack",
        "_pos", "_end", "_cv", "comparisons", "ops",
    )

    def __init__(self, vals: Sequence[Sequence[int]], idxs: Sequence[Sequence[int]],
                 offsets: Sequence[int] | None = None):
        self._vals = vals
        self._idxs = idxs
        self._offs = list(offsets) if offsets is not None else [0] * len(idxs)
        self.arity = len(vals)
        self.depth = -1
        self._stack: list[tuple[int, int]] = []
        self._pos = 0
        self._end = 1
        self._cv: Sequence[int] = ()
        self.comparisons = 0
        self.ops = 0

    @classmethod
    def over(cls, trie: TrieArray) -> "TrieIterator":
        vals, idxs = trie.lists
        return cls(vals, idxs)

    def open(self) -> None:
        d = self.depth
        if d == -1:
            start, end = 0, len(self._vals[0])
        else:
            if d >= self.arity - 1:
                raise ContractViolation("open() at leaf level")
            p = self._pos
            if p >= self._end:
                raise ContractViolation("open() while at_end")
            idx = self._idxs[d]
            off = self._offs[d]
            start = idx[p] - off
            end = idx[p + 1] - off
        self._stack.append((self._pos, self._end))
        self.depth = d + 1
        self._pos = start
        self._end = end
        self._cv = self._vals[d + 1]
        self.ops += 1

    def close(self) -> None:
        if self.depth < 0:
            raise ContractViolation("close() at root")
        self._pos, self._end = self._stack.pop()
        self.depth -= 1
        self._cv = self._vals[self.depth] if self.depth >= 0 else ()
        self.ops += 1

    def at_end(self) -> bool:
        return self._pos >= self._end

    def value(self) -> int:
        if self.depth < 0:
            raise ContractViolation("value() at root")
        if self._pos >= self._end:
            raise ContractViolation("value() while at_end")
        return self._cv[self._pos]

    def next(self) -> None:
        if self.depth < 0 or self._pos >= self._end:
            raise ContractViolation("next() at root or while at_end")
        self._pos += 1
        self.ops += 1

    def seek(self, v: int) -> None:
        """Move to the least sibling >= v (or at_end).

        Gallops from the current position with strides 1, 4, 16, ... and
        then bisects inside the bracket, which gives O(1 + log(N/m))
        amortised comparisons over m ascending seeks.
        """
        self.ops += 1
        lo = self._pos
        end = self._end
        if self.depth < 0 or lo >= end:
            raise ContractViolation("seek() at root or while at_end")
        cv = self._cv
        cur = cv[lo]
        self.comparisons += 1
        if cur >= v:
            if cur > v:
                raise ContractViolation(f"seek({v}) below current value {cur}")
            return
        step = 1
        while True:
            probe = lo + step
            if probe >= end:
                hi = end
                break
            self.comparisons += 1
            if cv[probe] >= v:
                hi = probe
                break
            lo = probe
            step <<= 2
        # answer lies in (lo, hi]
        n = hi - lo - 1
        if n > 0:
            self.comparisons += n.bit_length()
            self._pos = bisect_left(cv, v, lo + 1, hi)
        else:
            self._pos = hi


class EqualIterator:
    """The infinite binary relation {(x, x)}.

    At depth 0 it behaves as the whole integer domain (positioned wherever the
    enclosing leapfrog join seeks it); at depth 1 it exposes exactly one
    child, the depth-0 value.  It must never be the only iterator joined on
    its first variable.
    """

    __slots__ = ("depth", "_v0", "_v1", "_end", "comparisons", "ops")
    arity = 2

    def __init__(self):
        self.depth = -1
        self._v0 = NEG_INF
        self._v1 = 0
        self._end = False
        self.comparisons = 0
        self.ops = 0

    def open(self) -> None:
        self.ops += 1
        if self.depth == -1:
            self.depth = 0
            self._v0 = NEG_INF
            self._end = False
        elif self.depth == 0:
            if self._end:
                raise ContractViolation("open() while at_end")
            self.depth = 1
            self._v1 = self._v0
        else:
            raise ContractViolation("open() at leaf level")

    def close(self) -> None:
        self.ops += 1
        if self.depth < 0:
            raise ContractViolation("close() at root")
        if self.depth == 1:
            self._end = False
        self.depth -= 1

    def at_end(self) -> bool:
        return self._end

    def value(self) -> int:
        if self.depth < 0 or self._end:
            raise ContractViolation("value() at root or while at_end")
        return self._v0 if self.depth == 0 else self._v1

    def next(self) -> None:
        self.ops += 1
        if self.depth < 0 or self._end:
            raise ContractViolation("next() at root or while at_end")
        if self.depth == 0:
            self._v0 += 1
            if self._v0 >= POS_INF:
                self._end = True
        else:
            self._end = True

    def seek(self, v: int) -> None:
        self.ops += 1
        self.comparisons += 1
        if self.depth < 0 or self._end:
            raise ContractViolation("seek() at root or while at_end")
        if self.depth == 0:
            if v < self._v0:
                raise ContractViolation(f"seek({v}) below current value {self._v0}")
            self._v0 = v
        else:
            if v < self._v1:
                raise ContractViolation(f"seek({v}) below current value {self._v1}")
            if v > self._v1:
                self._end = True


def equal_iterator() -> EqualIterator:
    return EqualIterator()
