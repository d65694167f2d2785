import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxlftj.relation_store import (
    RelationCatalog,
    RelationCatalogEntry,
    RelationError,
    TrieArray,
    TrieArrayFormatError,
    build_from_sorted,
    enumerate_tuples,
    ingest_csv,
    load,
    make_alternative_index,
    persist,
    validate,
    write_csv,
)

from oracles import SAMPLE_E


def as_lists(t: TrieArray):
    return [v.tolist() for v in t.vals], [i.tolist() for i in t.idxs]


def test_sample_layout(sample):
    vals, idxs = as_lists(sample)
    assert vals[0] == [1, 2, 3, 4, 5, 6]
    assert idxs[0] == [0, 3, 5, 6, 8, 9, 10]
    assert vals[1] == [2, 3, 6, 4, 5, 6, 5, 7, 7, 7]
    # children of 3 start at position 5
    assert idxs[0][2] == 5


def test_empty_relation():
    t = build_from_sorted([], 2)
    vals, idxs = as_lists(t)
    assert vals == [[], []]
    # half-open convention keeps the sentinel entry even when empty
    assert idxs == [[0]]
    assert len(t) == 0
    assert enumerate_tuples(t) == []


def test_single_tuple_arity3():
    vals, idxs = as_lists(build_from_sorted([(7, 7, 7)], 3))
    assert vals == [[7], [7], [7]]
    assert idxs == [[0, 1], [0, 1]]


def test_rejects_unsorted_and_duplicates():
    with pytest.raises(RelationError, match="unsorted tuple at position 2"):
        build_from_sorted([(1, 2), (1, 3), (1, 1)], 2)
    with pytest.raises(RelationError, match="duplicate tuple at position 1"):
        build_from_sorted([(1, 2), (1, 2)], 2)
    with pytest.raises(RelationError, match="arity"):
        build_from_sorted([(1, 2), (1, 2, 3)], 2)


tuple_sets = st.integers(1, 4).flatmap(
    lambda a: st.tuples(
        st.just(a), st.sets(st.tuples(*[st.integers(0, 63)] * a), max_size=60)
    )
)


@given(tuple_sets)
def test_build_enumerate_roundtrip(arg):
    a, rows = arg
    rows = sorted(rows)
    t = build_from_sorted(rows, a)
    assert enumerate_tuples(t) == rows
    validate(t)
    # index arrays monotone, start at 0, end at the next length
    for i, idx in enumerate(t.idxs):
        assert idx[0] == 0 and idx[-1] == len(t.vals[i + 1])
        assert np.all(np.diff(idx) >= 0)
    assert len(t.vals[-1]) == len(rows)
    assert len(t.vals[0]) == len({r[0] for r in rows})
    # linear space
    assert t.total_words <= 2 * a * len(rows) + a


def test_ingest_csv_symmetrize(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("2,1\n1,2\n3,3\n")
    assert ingest_csv(p, 2, dedup=True, symmetrize_min_max=True) == [(1, 2)]


def test_ingest_csv_passthrough(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("5,4\n")
    assert ingest_csv(p, 2) == [(5, 4)]


def test_ingest_sample_undirected(tmp_path):
    # each undirected edge listed once in reverse orientation, plus duplicates
    p = tmp_path / "g.csv"
    p.write_text("".join(f"{b},{a}\n{a},{b}\n" for a, b in SAMPLE_E))
    assert ingest_csv(p, 2, dedup=True, symmetrize_min_max=True) == SAMPLE_E


def test_ingest_csv_bad_field(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,x\n")
    with pytest.raises(RelationError, match="line 2"):
        ingest_csv(p, 2)


def test_write_csv_roundtrip(tmp_path):
    p = tmp_path / "o.csv"
    write_csv(p, SAMPLE_E)
    assert ingest_csv(p, 2) == SAMPLE_E


def test_persist_roundtrip(tmp_path, sample):
    p = tmp_path / "e.tarr"
    persist(sample, p)
    assert load(p) == sample
    raw = p.read_bytes()
    assert raw[:4] == b"TARR"
    # header + 2 value lengths + 1 index length + 6 + 7 + 10 elements
    assert len(raw) == 12 + 8 * 3 + 8 * 23


def test_persist_empty_and_unary(tmp_path):
    for t in (build_from_sorted([], 3), build_from_sorted([(1,), (5,)], 1)):
        p = tmp_path / "t.tarr"
        persist(t, p)
        assert load(p) == t


def test_load_bad_magic(tmp_path, sample):
    p = tmp_path / "e.tarr"
    persist(sample, p)
    raw = bytearray(p.read_bytes())
    raw[0:4] = b"XXXX"
    p.write_bytes(bytes(raw))
    with pytest.raises(TrieArrayFormatError, match="bad magic") as ei:
        load(p)
    assert ei.value.field == "magic"


def test_load_bad_version_and_truncation(tmp_path, sample):
    p = tmp_path / "e.tarr"
    persist(sample, p)
    raw = bytearray(p.read_bytes())
    bad = bytearray(raw)
    bad[4] = 9
    p.write_bytes(bytes(bad))
    with pytest.raises(TrieArrayFormatError) as ei:
        load(p)
    assert ei.value.field == "version"
    p.write_bytes(bytes(raw[:-8]))
    with pytest.raises(TrieArrayFormatError) as ei:
        load(p)
    assert ei.value.field == "arrays"
    p.write_bytes(bytes(raw[:6]))
    with pytest.raises(TrieArrayFormatError) as ei:
        load(p)
    assert ei.value.field == "header"


def test_load_corrupt_index_sentinel(tmp_path, sample):
    p = tmp_path / "e.tarr"
    persist(sample, p)
    raw = bytearray(p.read_bytes())
    # idx_0 follows the 12-byte header, 24 bytes of lengths and 6 values
    last = 12 + 24 + 6 * 8 + 6 * 8
    assert int.from_bytes(raw[last:last + 8], "little") == 10
    raw[last:last + 8] = (9).to_bytes(8, "little")
    p.write_bytes(bytes(raw))
    with pytest.raises(TrieArrayFormatError, match="invariant violation") as ei:
        load(p)
    assert ei.value.field == "idx_0"


def test_alternative_index():
    t = make_alternative_index([(1, 9), (2, 8)], (1, 0))
    assert enumerate_tuples(t) == [(8, 2), (9, 1)]
    assert enumerate_tuples(make_alternative_index([(1, 9), (2, 8)], (0, 1))) == [(1, 9), (2, 8)]
    rev = enumerate_tuples(make_alternative_index(SAMPLE_E, (1, 0)))
    assert rev == [(2, 1), (3, 1), (4, 2), (5, 2), (5, 4), (6, 1), (6, 3), (7, 4), (7, 5), (7, 6)]
    assert rev == sorted((b, a) for a, b in SAMPLE_E)
    with pytest.raises(RelationError):
        make_alternative_index([(1, 2)], (0, 0))


def test_catalog_entries(sample):
    cat = RelationCatalog()
    cat.add("E", sample, "e.tarr")
    assert cat.index("E", (0, 1)) is sample
    rev = cat.index("E", (1, 0))
    assert cat.index("E", (1, 0)) is rev
    entries = {(e.name, e.permutation) for e in cat.entries()}
    assert entries == {("E", (0, 1)), ("E", (1, 0))}
    with pytest.raises(RelationError):
        RelationCatalogEntry("E", 2, (0, 2))
