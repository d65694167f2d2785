#!/usr/bin/env python3
"""Provision/probe block reads of the boxed triangle query as the budget
shrinks, on a fixed RAND graph."""
import argparse

from boxlftj.boxer import BoxingConfig, run_boxed
from boxlftj.generators import gen_rand
from boxlftj.triejoin import ResultSink

from _common import triangle_setup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--edges", type=int, default=100_000)
    ap.add_argument("--nodes", type=int, default=20_000)
    ap.add_argument("--block-size", type=int, default=64)
    ap.add_argument("--fractions", default="1,0.5,0.25,0.125,0.0625")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    cat, q = triangle_setup(gen_rand(args.nodes, args.edges, args.seed))
    words = cat.relations["E"].total_words
    print(f"# input words={words}")
    print("fraction,memory_words,boxes,spills,provision_reads,probe_reads,growth")
    prev = None
    for f in map(float, args.fractions.split(",")):
        M = int(words * f)
        _, s, _ = run_boxed(q, cat, BoxingConfig(M, args.block_size, record_boxes=False), ResultSink())
        growth = "" if prev is None else f"{s.provision_block_reads / prev:.2f}"
        prev = s.provision_block_reads
        print(f"{f},{M},{s.boxes},{s.spills},{s.provision_block_reads},{s.probe_block_reads},{growth}")


if __name__ == "__main__":
    main()
