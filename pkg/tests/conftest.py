import math
import random

import pytest
from hypothesis import HealthCheck, settings

from boxlftj.boxer import BoxingConfig, InfeasibleBudget, run_boxed
from boxlftj.query import normalize, parse
from boxlftj.relation_store import RelationCatalog, build_from_sorted

from oracles import SAMPLE_E, TRIANGLE

settings.register_profile(
    "repo", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def sample():
    return build_from_sorted(SAMPLE_E, 2)


@pytest.fixture
def sample_catalog(sample):
    cat = RelationCatalog()
    cat.add("E", sample)
    return cat


def edge_catalog(edges):
    cat = RelationCatalog()
    cat.add("E", build_from_sorted(sorted(set(edges)), 2))
    return cat


def triangle_query(cat):
    return normalize(parse(TRIANGLE, cat.arities()))


def random_boxed_runs(q, cat, r: random.Random, count: int, sink_factory, block_sizes=(4, 8, 16)):
    """``count`` boxed runs at random budgets the engine accepts.

    Budgets are drawn log-uniformly between a lower bound and twice the
    input size; a rejection raises the lower bound for that block size.
    Returns (list of (config, sink, stats, state), rejections).
    """
    words = sum(t.total_words for t in cat.relations.values())
    lows = {B: 3 for B in block_sizes}
    out, rejected = [], 0
    while len(out) < count:
        B = r.choice(block_sizes)
        lo = lows[B]
        hi = max(lo + 1, 2 * words // B + 8)
        tb = int(math.exp(r.uniform(math.log(lo), math.log(hi))))
        cfg = BoxingConfig((tb + 1) * B, B)
        try:
            sink, stats, state = run_boxed(q, cat, cfg, sink_factory())
        except InfeasibleBudget:
            rejected += 1
            lows[B] = max(lows[B], tb + 1)
            continue
        out.append((cfg, sink, stats, state))
    return out, rejected


# criterion name -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
