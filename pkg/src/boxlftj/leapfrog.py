"""Leapfrog join: intersection of n linear iterators by repeated seek-to-max."""
from __future__ import annotations

from typing import Sequence

from .trie_iter import ContractViolation


class LeapfrogJoin:
    """Maintains ``iters`` sorted circularly by value; ``p`` indexes the
    iterator at the smallest value, so ``iters[p - 1]`` holds the largest."""

    __slots__ = ("iters", "p", "_at_end", "_n")

    def __init__(self, iters: Sequence):
        if not iters:
            raise ValueError("leapfrog join needs at least one iterator")
        self.iters = list(iters)
        self._n = len(self.iters)
        self.p = 0
        self._at_end = True

    def init(self) -> None:
        its = self.iters
        for it in its:
            if it.at_end():
                self._at_end = True
                return
        # list.sort is stable: ties keep input order
        its.sort(key=_value)
        self.p = 0
        self._at_end = False
        self._search()

    def _search(self) -> None:
        its = self.iters
        n = self._n
        p = self.p
        x_max = its[p - 1].value()
        while True:
            it = its[p]
            x = it.value()
            if x == x_max:
                self.p = p
                return
            it.seek(x_max)
            if it.at_end():
                self.p = p
                self._at_end = True
                return
            x_max = it.value()
            p += 1
            if p == n:
                p = 0

    def next(self) -> None:
        if self._at_end:
            raise ContractViolation("lfj next() while at_end")
        it = self.iters[self.p]
        it.next()
        if it.at_end():
            self._at_end = True
            return
        self.p = (self.p + 1) % self._n
        self._search()

    def seek(self, v: int) -> None:
        if self._at_end:
            raise ContractViolation("lfj seek() while at_end")
        it = self.iters[self.p]
        if v < it.value():
            raise ContractViolation(f"lfj seek({v}) below current value {it.value()}")
        it.seek(v)
        if it.at_end():
            self._at_end = True
            return
        self.p = (self.p + 1) % self._n
        self._search()

    def value(self) -> int:
        if self._at_end:
            raise ContractViolation("lfj value() while at_end")
        return self.iters[self.p].value()

    def at_end(self) -> bool:
        return self._at_end


def _value(it) -> int:
    return it.value()


def lfj_init(iters: Sequence) -> LeapfrogJoin:
    lf = LeapfrogJoin(iters)
    lf.init()
    return lf


def intersect(iters: Sequence) -> list[int]:
    """Drain a leapfrog join over already-opened iterators."""
    lf = lfj_init(iters)
    out = []
    while not lf.at_end():
        out.append(lf.value())
        lf.next()
    return out
