"""Command-line entry point: ``boxlftj <subcommand> ...`` (or ``python -m boxlftj``)."""
from __future__ import annotations

import argparse
import logging
import sys

from . import generators
from .harness import RunConfig, run
from .relation_store import build_from_sorted, ingest_csv, make_alternative_index, persist, write_csv


def _write_edges(edges, out):
    if out:
        write_csv(out, edges)
    else:
        sys.stdout.writelines(",".join(map(str, e)) + "\n" for e in edges)


def _binding(text: str) -> tuple[str, str]:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected name=path, got {text!r}")
    return name, path


def _onoff(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boxlftj", description="Boxed Leapfrog Triejoin")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen-rand", help="uniform random simple graph")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--edges", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    g = sub.add_parser("gen-rmat", help="R-MAT graph")
    g.add_argument("--scale", type=int, required=True)
    g.add_argument("--edges", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--probs", default="0.57,0.19,0.19,0.05")
    g.add_argument("--out")

    g = sub.add_parser("gen-clique", help="disjoint cliques of size 2*alpha")
    g.add_argument("--alpha", type=int, required=True)
    g.add_argument("--edges", type=int, required=True)
    g.add_argument("--out")

    g = sub.add_parser("gen-pathological", help="LRU-thrashing graph G_N")
    g.add_argument("-N", type=int, required=True)
    g.add_argument("-M", type=int, required=True)
    g.add_argument("-B", type=int, required=True)
    g.add_argument("--out")

    g = sub.add_parser("build-trie", help="CSV -> TrieArray file")
    g.add_argument("--csv", required=True)
    g.add_argument("--arity", type=int, default=2)
    g.add_argument("--symmetrize", action="store_true",
                   help="orient edges as (min,max) and drop self-loops")
    g.add_argument("--permutation", help="column order of the index, e.g. 2,1")
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="evaluate a query")
    r.add_argument("--query", required=True)
    r.add_argument("--bind", type=_binding, action="append", default=[], metavar="NAME=PATH")
    r.add_argument("--order", help="key order, e.g. x,y,z (overrides the query's directive)")
    r.add_argument("--memory", type=int, default=1 << 20, help="memory M in words")
    r.add_argument("--block-size", type=int, default=512, help="block size B in words")
    r.add_argument("--mode", choices=("boxed", "vanilla"), default="boxed")
    r.add_argument("--sink", choices=("count", "list"), default="count")
    r.add_argument("--out", help="CSV output file for list mode")
    r.add_argument("--ratio", help="budget ratio over atom-owning dimensions, e.g. 4:1")
    r.add_argument("--constraint-hook", type=_onoff, default=False, metavar="on|off")
    r.add_argument("--lazy", action="store_true", help="lazy provisioning (I/O counters only)")
    r.add_argument("--parallel", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "gen-rand":
            _write_edges(generators.gen_rand(args.nodes, args.edges, args.seed), args.out)
        elif args.cmd == "gen-rmat":
            probs = tuple(float(p) for p in args.probs.split(","))
            _write_edges(generators.gen_rmat(args.scale, args.edges, args.seed, probs), args.out)
        elif args.cmd == "gen-clique":
            _write_edges(generators.gen_clique_pack(args.alpha, args.edges), args.out)
        elif args.cmd == "gen-pathological":
            _write_edges(generators.gen_pathological(args.N, args.M, args.B), args.out)
        elif args.cmd == "build-trie":
            rows = ingest_csv(args.csv, args.arity, dedup=True, symmetrize_min_max=args.symmetrize)
            if args.permutation:
                perm = [int(p) - 1 for p in args.permutation.split(",")]
                trie = make_alternative_index(rows, perm)
            else:
                trie = build_from_sorted(rows, args.arity)
            persist(trie, args.out)
            print(f"tuples={len(trie)}\nwords={trie.total_words}")
        elif args.cmd == "run":
            cfg = RunConfig(
                query_file=args.query, bindings=dict(args.bind),
                order=tuple(args.order.split(",")) if args.order else None,
                memory_words=args.memory, block_size=args.block_size, mode=args.mode,
                sink=args.sink, out=args.out, ratio=args.ratio,
                constraint_hook=args.constraint_hook, parallel=args.parallel,
                lazy=args.lazy, seed=args.seed,
            )
            code, _, text = run(cfg)
            (sys.stdout if code == 0 else sys.stderr).write(text)
            return code
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
