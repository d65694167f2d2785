#!/usr/bin/env python3
"""Smallest star-hub degree that makes the boxed triangle query spill,
for a range of memory budgets.  Reports what is observed; no formula is
assumed."""
import argparse

from boxlftj.boxer import BoxingConfig, run_boxed
from boxlftj.generators import gen_star
from boxlftj.triejoin import ResultSink

from _common import triangle_setup


def spills(degree, M, B):
    cat, q = triangle_setup(gen_star(degree))
    _, s, _ = run_boxed(q, cat, BoxingConfig(M, B, record_boxes=False), ResultSink())
    return s.spills


def threshold(M, B, cap=1 << 14):
    # double until it spills, then bisect
    hi = 2
    while not spills(hi, M, B):
        hi *= 2
        if hi > cap:
            return None
    lo = hi // 2 + 1
    # spilling is monotone in the hub degree for a fixed budget
    while lo < hi:
        mid = (lo + hi) // 2
        if spills(mid, M, B):
            hi = mid
        else:
            lo = mid + 1
    return lo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--memory", default="256,512,1024,2048,4096")
    ap.add_argument("--block-size", type=int, default=16)
    args = ap.parse_args()
    print("memory_words,block_size,per_dim_words,threshold_degree")
    for M in map(int, args.memory.split(",")):
        per_dim = (M // args.block_size // 2) * args.block_size
        print(f"{M},{args.block_size},{per_dim},{threshold(M, args.block_size)}")


if __name__ == "__main__":
    main()
