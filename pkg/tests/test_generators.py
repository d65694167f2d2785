from itertools import combinations

import pytest

from boxlftj.generators import (
    clique_pack_lower_bound,
    clique_pack_triangles,
    gen_clique_pack,
    gen_rand,
    gen_rmat,
    gen_star,
    triangle_count_brute,
    triangle_count_fast,
    triangles_brute,
)

from conftest import edge_catalog, triangle_query
from boxlftj.triejoin import ResultSink, lftj_run, plan_from_catalog


def lftj_count(edges):
    cat = edge_catalog(edges)
    return lftj_run(plan_from_catalog(triangle_query(cat), cat), ResultSink()).count


def simple(edges):
    return all(u < v for u, v in edges) and len(set(edges)) == len(edges) and edges == sorted(edges)


def test_rand_complete_graph():
    edges = gen_rand(10, 45)
    assert edges == list(combinations(range(10), 2))
    assert lftj_count(edges) == 120


def test_rand_against_brute():
    edges = gen_rand(200, 1000, 1)
    assert len(edges) == 1000 and simple(edges)
    assert lftj_count(edges) == triangle_count_brute(edges)


def test_rand_edge_cases():
    assert gen_rand(50, 0) == []
    with pytest.raises(ValueError):
        gen_rand(4, 7)
    assert gen_rand(30, 200, 7) == gen_rand(30, 200, 7)
    assert gen_rand(30, 200, 7) != gen_rand(30, 200, 8)


def test_rmat_small_and_structure():
    assert gen_rmat(1, 1) == [(0, 1)]
    edges = gen_rmat(8, 1500, 3)
    assert len(edges) == 1500 and simple(edges)
    assert all(v < 256 for _, v in edges)
    deg = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    # skewed toward low ids: node 0 is far above the mean degree
    assert deg.get(0, 0) > 4 * (2 * 1500 / 256)
    with pytest.raises(ValueError):
        gen_rmat(2, 7)
    with pytest.raises(ValueError):
        gen_rmat(4, 10, probs=(0.5, 0.5, 0.5, 0.5))


def test_rmat_against_brute():
    edges = gen_rmat(10, 5000, 0)
    assert len(edges) == 5000
    assert lftj_count(edges) == triangle_count_brute(edges)


def test_rmat_round_cap():
    # 6 possible edges on 4 nodes; with all mass on one quadrant the draw
    # can never get past the first cell
    with pytest.raises(RuntimeError):
        gen_rmat(2, 3, probs=(1.0, 0.0, 0.0, 0.0), max_rounds=5)


@pytest.mark.parametrize("alpha", [2, 3, 4])
def test_clique_pack_counts(alpha):
    k = 2 * alpha
    l = k * (k - 1) // 2
    for m in (l, 3 * l + 1, 10 * l + l - 1):
        edges = gen_clique_pack(alpha, m)
        assert len(edges) == m and simple(sorted(edges))
        want = clique_pack_triangles(alpha, m)
        assert lftj_count(sorted(edges)) == want == triangle_count_fast(edges)
        assert want >= clique_pack_lower_bound(alpha, m)


def test_clique_pack_examples():
    assert clique_pack_triangles(2, 12) == 8
    assert len(gen_clique_pack(2, 12)) == 12
    assert gen_clique_pack(2, 7)[-1] == (4, 5)
    edges = gen_clique_pack(2, 13)
    assert len(edges) == 13 and edges[-1] == (8, 9)
    assert lftj_count(sorted(edges)) == 8
    with pytest.raises(ValueError):
        gen_clique_pack(1, 10)


def test_star():
    edges = gen_star(5)
    assert len(edges) == 9
    assert triangles_brute(edges) == [(0, i, i + 1) for i in range(1, 5)]
    assert triangle_count_fast(edges) == 4
