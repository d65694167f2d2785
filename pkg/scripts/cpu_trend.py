#!/usr/bin/env python3
"""Iterator operations of unboxed LFTJ on clique packs, against c*m*log m
calibrated at the smallest size."""
import argparse
import math
import time

from boxlftj.generators import gen_clique_pack
from boxlftj.triejoin import ResultSink, lftj_run, plan_from_catalog

from _common import triangle_setup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=int, default=3)
    ap.add_argument("--edges", default="10000,20000,40000,80000,160000")
    args = ap.parse_args()
    print("m,iterator_ops,fit,seconds")
    c = None
    for m in map(int, args.edges.split(",")):
        cat, q = triangle_setup(gen_clique_pack(args.alpha, m))
        t = time.perf_counter()
        ops = lftj_run(plan_from_catalog(q, cat), ResultSink()).iterator_ops
        dt = time.perf_counter() - t
        if c is None:
            c = ops / (m * math.log2(m))
        print(f"{m},{ops},{ops / (c * m * math.log2(m)):.3f},{dt:.2f}")


if __name__ == "__main__":
    main()
