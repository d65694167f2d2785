import math
from bisect import bisect_left

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxlftj.relation_store import build_from_sorted, enumerate_tuples
from boxlftj.trie_iter import ContractViolation, EqualIterator, TrieIterator

# Frozen once from measurements (worst observed about 2.5).
SEEK_C = 3.0


def test_sample_walk(sample):
    it = TrieIterator.over(sample)
    it.open()
    assert it.value() == 1
    it.next()
    assert it.value() == 2
    it.open()
    assert it.value() == 4
    it.next()
    assert it.value() == 5
    it.next()
    assert it.at_end()
    it.close()
    assert it.value() == 2 and it.depth == 0


def test_empty_relation_open():
    it = TrieIterator.over(build_from_sorted([], 2))
    it.open()
    assert it.depth == 0 and it.at_end()


def test_seek_in_sibling_group(sample):
    it = TrieIterator.over(sample)
    it.open()
    it.open()  # children of 1: [2, 3, 6]
    it.seek(4)
    assert it.value() == 6
    it.seek(6)
    assert it.value() == 6
    it.seek(7)
    assert it.at_end()


def test_seek_lands_on_smallest_larger_sibling():
    # node b with children u < v < z and v < w < z
    u, v, w, z = 10, 20, 25, 30
    t = build_from_sorted([(1, u), (1, v), (1, z)], 2)
    it = TrieIterator.over(t)
    it.open()
    it.open()
    it.seek(w)
    assert it.value() == z


def test_contract_violations(sample):
    it = TrieIterator.over(sample)
    with pytest.raises(ContractViolation):
        it.value()
    with pytest.raises(ContractViolation):
        it.close()
    with pytest.raises(ContractViolation):
        it.next()
    it.open()
    it.seek(3)
    with pytest.raises(ContractViolation):
        it.seek(2)
    it.seek(99)
    with pytest.raises(ContractViolation):
        it.next()
    with pytest.raises(ContractViolation):
        it.open()
    it.close()
    it.open()
    it.open()
    with pytest.raises(ContractViolation):
        it.open()  # leaf


def full_walk(it, arity):
    out = []

    def rec(prefix):
        it.open()
        while not it.at_end():
            t = prefix + (it.value(),)
            if len(t) == arity:
                out.append(t)
            else:
                rec(t)
            it.next()
        it.close()

    rec(())
    return out


rels = st.integers(1, 4).flatmap(
    lambda a: st.tuples(st.just(a), st.sets(st.tuples(*[st.integers(0, 9)] * a), max_size=40))
)


@given(rels)
def test_walk_enumerates_relation(arg):
    a, rows = arg
    rows = sorted(rows)
    t = build_from_sorted(rows, a)
    assert full_walk(TrieIterator.over(t), a) == rows == enumerate_tuples(t)


@given(st.sets(st.integers(-50, 50), min_size=1, max_size=60), st.data())
def test_seek_matches_linear_scan(sibs, data):
    sibs = sorted(sibs)
    start = data.draw(st.integers(0, len(sibs) - 1))
    v = data.draw(st.integers(sibs[start], 60))
    it = TrieIterator([sibs], [])
    it.open()
    for _ in range(start):
        it.next()
    it.seek(v)
    expect = next((i for i in range(start, len(sibs)) if sibs[i] >= v), None)
    if expect is None:
        assert it.at_end()
    else:
        assert it.value() == sibs[expect]


def seek_comparisons(n_sibs, keys):
    arr = list(range(n_sibs))
    it = TrieIterator([arr], [])
    it.open()
    for k in keys:
        if it.at_end():
            break
        it.seek(k)
        assert it.at_end() or it.value() == arr[bisect_left(arr, k)]
    return it.comparisons


def envelope(m, n):
    return m * (1 + math.log2(max(n / m, 2)))


def test_dense_every_thousandth():
    sibs = list(range(10, 10 ** 5 + 1))
    keys = sibs[::1000]
    it = TrieIterator([sibs], [])
    it.open()
    for k in keys:
        it.seek(k)
        assert it.value() == k
    assert it.comparisons <= SEEK_C * envelope(len(keys), len(sibs))


@given(st.integers(1, 3000), st.integers(1, 200), st.randoms(use_true_random=False))
def test_amortized_seek_envelope(n, m, rnd):
    m = min(m, n)
    keys = sorted(rnd.sample(range(n), m))
    assert seek_comparisons(n, keys) <= SEEK_C * envelope(m, n)


def test_equal_iterator():
    eq = EqualIterator()
    eq.open()
    eq.seek(7)
    assert eq.value() == 7
    eq.open()
    assert eq.value() == 7
    eq.next()
    assert eq.at_end()
    eq.close()
    eq.open()
    eq.seek(7)
    assert eq.value() == 7
    eq.seek(8)
    assert eq.at_end()
    eq.close()
    eq.next()
    assert eq.value() == 8
    with pytest.raises(ContractViolation):
        eq.seek(3)
