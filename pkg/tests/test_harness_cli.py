import pytest

from boxlftj.cli import main
from boxlftj.generators import triangle_count_fast
from boxlftj.harness import RunConfig, run
from boxlftj.io_model import RunStats
from boxlftj.relation_store import build_from_sorted, load, persist, write_csv

from oracles import SAMPLE_E, TRIANGLE


@pytest.fixture
def workspace(tmp_path):
    persist(build_from_sorted(SAMPLE_E, 2), tmp_path / "e.trie")
    (tmp_path / "q.dl").write_text(TRIANGLE + "\n")
    return tmp_path


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_boxed_and_vanilla(workspace, capsys):
    args = ["run", "--query", workspace / "q.dl", "--bind", f"E={workspace / 'e.trie'}",
            "--memory", 64, "--block-size", 4]
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    boxed = RunStats.parse(out)
    assert "mode=boxed" in out and "footprint_metric=" in out
    code, out, _ = run_cli(capsys, *args, "--mode", "vanilla")
    vanilla = RunStats.parse(out)
    assert boxed.output_count == vanilla.output_count == 3
    assert vanilla.lru_block_loads > 0 and boxed.lru_block_loads == 0
    assert boxed.block_reads > 0


def test_list_mode_csv(workspace, capsys):
    out_csv = workspace / "t.csv"
    code, out, _ = run_cli(
        capsys, "run", "--query", workspace / "q.dl", "--bind", f"E={workspace / 'e.trie'}",
        "--sink", "list", "--out", out_csv, "--memory", 40, "--block-size", 2,
    )
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert len(lines) == RunStats.parse(out).output_count == 3
    assert sorted(lines) == ["1,3,6", "2,4,5", "4,5,7"]


def test_pipeline_generate_build_run(tmp_path, capsys):
    csv = tmp_path / "g.csv"
    assert run_cli(capsys, "gen-rand", "--nodes", 60, "--edges", 300, "--seed", 2, "--out", csv)[0] == 0
    trie = tmp_path / "g.trie"
    code, out, _ = run_cli(capsys, "build-trie", "--csv", csv, "--symmetrize", "--out", trie)
    assert code == 0 and "tuples=300" in out
    q = tmp_path / "q.dl"
    q.write_text(TRIANGLE)
    argv = ["run", "--query", q, "--bind", f"E={trie}", "--memory", 512, "--block-size", 8]
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert first == second
    edges = [tuple(map(int, l.split(","))) for l in csv.read_text().splitlines()]
    assert RunStats.parse(first).output_count == triangle_count_fast(edges)
    # CSV bindings load directly as well
    _, third, _ = run_cli(capsys, "run", "--query", q, "--bind", f"E={csv}", "--memory", 512,
                          "--block-size", 8)
    assert third == first


def test_build_trie_permutation(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    write_csv(csv, [(1, 5), (2, 4)])
    out = tmp_path / "r21.trie"
    assert run_cli(capsys, "build-trie", "--csv", csv, "--permutation", "2,1", "--out", out)[0] == 0
    assert load(out).tuples() == [(4, 2), (5, 1)]


@pytest.mark.parametrize("cmd", [
    ["gen-rmat", "--scale", 4, "--edges", 20],
    ["gen-clique", "--alpha", 2, "--edges", 12],
    ["gen-pathological", "-N", 24, "-M", 20, "-B", 4],
])
def test_generators_cli(capsys, cmd):
    code, out, _ = run_cli(capsys, *cmd)
    assert code == 0 and out.strip()
    assert out == run_cli(capsys, *cmd)[1]


def test_errors_exit_nonzero(workspace, capsys):
    code, _, err = run_cli(capsys, "run", "--query", workspace / "q.dl", "--bind",
                           f"E={workspace / 'missing.trie'}")
    assert code != 0 and "error" in err
    code, _, err = run_cli(capsys, "run", "--query", workspace / "q.dl", "--bind",
                           f"E={workspace / 'e.trie'}", "--memory", 8, "--block-size", 4)
    assert code != 0
    assert run_cli(capsys, "gen-pathological", "-N", 5, "-M", 20, "-B", 4)[0] != 0
    bad = workspace / "bad.dl"
    bad.write_text("Q(x <- E(x).")
    code, _, err = run_cli(capsys, "run", "--query", bad, "--bind", f"E={workspace / 'e.trie'}")
    assert code != 0 and "1:5" in err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="fast")
    with pytest.raises(ValueError):
        RunConfig(memory_words=0)
    code, stats, text = run(RunConfig(query_text="Q(x) <- R(x).", bindings={}))
    assert code == 2 and stats is None
