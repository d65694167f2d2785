#!/usr/bin/env python3
"""Box counts of the triangle query on RAND graphs of growing size with
the budget held at a fixed fraction of the input."""
import argparse

from boxlftj.boxer import BoxingConfig, run_boxed
from boxlftj.generators import gen_rand
from boxlftj.triejoin import ResultSink

from _common import triangle_setup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--edges", default="10000,20000,40000,80000")
    ap.add_argument("--avg-degree", type=int, default=10)
    ap.add_argument("--fraction", type=float, default=0.5)
    ap.add_argument("--block-size", type=int, default=64)
    args = ap.parse_args()
    print("edges,input_words,memory_words,boxes,spills,triangles")
    for m in map(int, args.edges.split(",")):
        cat, q = triangle_setup(gen_rand(2 * m // args.avg_degree, m, 1))
        words = cat.relations["E"].total_words
        M = int(words * args.fraction)
        _, s, _ = run_boxed(q, cat, BoxingConfig(M, args.block_size, record_boxes=False), ResultSink())
        print(f"{m},{words},{M},{s.boxes},{s.spills},{s.output_count}")


if __name__ == "__main__":
    main()
