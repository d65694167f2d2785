#!/usr/bin/env python3
"""Vanilla LRU loads vs boxed block reads on the thrashing graphs G_N.

Prints one row per (N, M, B, memory multiplier).  The multiplier column
gives the boxed run more memory than the vanilla one, to show where the
boxed reads drop below the vanilla loads.
"""
import argparse

from boxlftj.boxer import BoxingConfig, InfeasibleBudget, run_boxed
from boxlftj.harness import run_vanilla
from boxlftj.io_model import gen_pathological
from boxlftj.triejoin import ResultSink

from _common import triangle_setup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="24:20:4,120:100:20,600:500:100,3000:2500:500")
    ap.add_argument("--multipliers", default="1,2,4")
    args = ap.parse_args()
    print("N,M,B,mult,vanilla_loads,boxed_reads,ratio,boxes,spills")
    for spec in args.sizes.split(","):
        N, M, B = map(int, spec.split(":"))
        cat, q = triangle_setup(gen_pathological(N, M, B))
        vanilla = run_vanilla(q, cat, M, B, ResultSink()).lru_block_loads
        for mult in map(int, args.multipliers.split(",")):
            try:
                _, s, _ = run_boxed(q, cat, BoxingConfig(M * mult, B, record_boxes=False), ResultSink())
            except InfeasibleBudget as e:
                print(f"{N},{M},{B},{mult},{vanilla},,,,  # {e}")
                continue
            print(f"{N},{M},{B},{mult},{vanilla},{s.block_reads},"
                  f"{s.block_reads / vanilla:.3f},{s.boxes},{s.spills}")


if __name__ == "__main__":
    main()
