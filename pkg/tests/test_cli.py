import json
import subprocess
import sys

import pytest

from oracles import brute_pk, brute_wd
from vecseg.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--out", str(root / "syn"), "--documents", "40", "--dim", "30"]) == EXIT_OK
    assert main(["gen", "--corpus", str(root / "syn" / "corpus"), "--out", str(root / "ds"),
                 "--documents", "16", "--seed", "3"]) == EXIT_OK
    return root


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# ----------------------------------------------------------------- segment

def test_character_demo(capsys, fixtures, tmp_path):
    code, out, _ = run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--level", "char", "--scorer",
                       "euclidean", "-K", "4", "--embeddings", fixtures / "onehot.txt",
                       "--annotate", tmp_path / "demo.html")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["boundaries"] == [3, 5, 8, 10]
    assert [s["chars"] for s in rec["segments"]] == [[0, 3], [3, 5], [5, 8], [8, 10]]
    html = (tmp_path / "demo.html").read_text()
    assert html.count("seg-even") >= 2 and html.count("seg-odd") >= 2


def test_k1_single_segment(capsys, workspace):
    ref = sorted((workspace / "ds").glob("*.ref"))[0]
    code, out, _ = run(capsys, "segment", ref, "--input-format", "reference", "-K", "1",
                       "--embeddings", workspace / "syn" / "embeddings.txt")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["boundaries"] == [rec["n_elements"]]


def test_offsets_are_valid(capsys, workspace, tmp_path):
    text = (workspace / "syn" / "corpus").glob("*.txt")
    src = next(text)
    code, _, _ = run(capsys, "segment", src, "-K", "3", "--embeddings", workspace / "syn" / "embeddings.txt",
                     "-o", tmp_path / "r.json", "--annotate", "-")
    rec = json.loads((tmp_path / "r.json").read_text())
    body = src.read_text()
    assert code == EXIT_OK
    prev = 0
    for s in rec["segments"]:
        a, b = s["chars"]
        assert prev <= a < b <= len(body)
        prev = b


def test_missing_embeddings_exit_names_path(capsys, fixtures):
    code, _, err = run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--level", "char", "-K", "2",
                       "--embeddings", "/no/such/vectors.txt")
    assert code == EXIT_DATA and "/no/such/vectors.txt" in err


def test_usage_errors(capsys, fixtures):
    assert run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--scorer", "tiling", "-K", "2")[0] == EXIT_USAGE
    assert run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--level", "char",
               "--embeddings", fixtures / "onehot.txt")[0] == EXIT_USAGE  # no K
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_flags_beat_config_file(capsys, fixtures, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"level=char\nscorer=cvs\nK=2\nembeddings={fixtures / 'onehot.txt'}\n")
    code, out, _ = run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--config", cfg,
                       "--scorer", "euclidean", "-K", "4")
    rec = json.loads(out)
    assert code == EXIT_OK
    assert rec["config"]["scorer"] == "euclidean" and rec["boundaries"] == [3, 5, 8, 10]


def test_config_file_beats_env(capsys, fixtures, tmp_path, monkeypatch):
    monkeypatch.setenv("VECSEG_EMBEDDINGS", "/env/path/ignored.txt")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"embeddings={fixtures / 'onehot.txt'}\n")
    code, out, _ = run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--config", cfg, "--level", "char",
                       "--scorer", "euclidean", "-K", "4")
    assert code == EXIT_OK
    monkeypatch.setenv("VECSEG_EMBEDDINGS", str(fixtures / "onehot.txt"))
    code, out, _ = run(capsys, "segment", fixtures / "aaabbcccdd.txt", "--level", "char",
                       "--scorer", "euclidean", "-K", "4")
    assert code == EXIT_OK and json.loads(out)["boundaries"] == [3, 5, 8, 10]


# ---------------------------------------------------------------- evaluate

def write_ref(path, lengths):
    lines = ["=========="]
    i = 0
    for n in lengths:
        lines += [f"sentence {i + j} ." for j in range(n)]
        lines.append("==========")
        i += n
    path.write_text("\n".join(lines) + "\n")
    return path


def test_evaluate_identical(capsys, tmp_path):
    ref = write_ref(tmp_path / "r.ref", [3, 4, 3])
    code, out, _ = run(capsys, "evaluate", ref, ref)
    rec = json.loads(out.splitlines()[1])
    assert code == EXIT_OK and rec["pk"] == 0 and rec["wd"] == 0


def test_evaluate_ten_element_fixture(capsys, tmp_path):
    ref = write_ref(tmp_path / "r.ref", [5, 5])
    hyp = write_ref(tmp_path / "h.ref", [3, 7])
    code, out, _ = run(capsys, "evaluate", ref, hyp)
    rec = json.loads(out.splitlines()[1])
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("pk=")
    assert rec == {"pk": brute_pk((5, 10), (3, 10), 2), "wd": brute_wd((5, 10), (3, 10), 2),
                   "k_used": 2, "n_probes": 8}


def test_evaluate_accepts_segment_record(capsys, tmp_path):
    ref = write_ref(tmp_path / "r.ref", [5, 5])
    (tmp_path / "h.json").write_text(json.dumps({"boundaries": [4, 10], "n_elements": 10}))
    code, out, _ = run(capsys, "evaluate", ref, tmp_path / "h.json")
    assert code == EXIT_OK and json.loads(out.splitlines()[1])["wd"] == brute_wd((5, 10), (4, 10), 2)


def test_evaluate_errors(capsys, tmp_path):
    ref = write_ref(tmp_path / "r.ref", [5, 5])
    other = write_ref(tmp_path / "o.ref", [5, 6])
    assert run(capsys, "evaluate", ref, other)[0] == EXIT_DATA
    bad = tmp_path / "bad.ref"
    bad.write_text("a\n=====\nb\n")
    assert run(capsys, "evaluate", ref, bad)[0] == EXIT_DATA


# --------------------------------------------------------------- benchmark

def test_benchmark_outputs_and_determinism(capsys, workspace, tmp_path):
    emb = workspace / "syn" / "embeddings.txt"
    outs = []
    for name in ("a", "b"):
        code, out, _ = run(capsys, "benchmark", workspace / "ds", "--preset", "R-CVS", "--embeddings", emb,
                           "--out", tmp_path / name, "--workers", "3" if name == "a" else "1")
        assert code == EXIT_OK
        outs.append(out)
    for f in ("results.jsonl", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    records = [json.loads(l) for l in (tmp_path / "a" / "results.jsonl").read_text().splitlines()]
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert [r["id"] for r in records] == sorted(r["id"] for r in records)
    assert summary["n_documents"] == 16 and summary["n_failed"] == 0
    # re-aggregating the per-document records reproduces the summary means exactly
    assert abs(summary["mean_pk"] - sum(r["pk"] for r in records) / len(records)) < 1e-12
    assert abs(summary["mean_wd"] - sum(r["wd"] for r in records) / len(records)) < 1e-12
    assert summary["config"]["splitter"] == "refine"
    timing = json.loads((tmp_path / "a" / "timings.jsonl").read_text().splitlines()[-1])["summary"]
    assert timing["dp_over_refine"] > 0
    assert "ratio" in outs[0]


def test_benchmark_unusable_embeddings(capsys, workspace, tmp_path):
    # a table sharing no vocabulary with the dataset is a data error before any document runs
    (tmp_path / "tiny.txt").write_text("zzzz 1 0\n")
    code, _, err = run(capsys, "benchmark", workspace / "ds", "--preset", "DP-CVS",
                       "--embeddings", tmp_path / "tiny.txt", "--out", tmp_path / "o")
    assert code == EXIT_DATA and "no vectors" in err


def test_benchmark_empty_dir(capsys, tmp_path):
    (tmp_path / "empty").mkdir()
    assert run(capsys, "benchmark", tmp_path / "empty", "--embeddings", "x")[0] == EXIT_DATA


# ---------------------------------------------------------- gen, idf, audit

def test_gen_is_byte_identical(capsys, workspace, tmp_path):
    for name in ("x", "y"):
        code, out, _ = run(capsys, "gen", "--corpus", workspace / "syn" / "corpus", "--out", tmp_path / name,
                           "--documents", "10", "--seed", "5")
        assert code == EXIT_OK and "unique" in out
    files = sorted(p.name for p in (tmp_path / "x").iterdir())
    assert len(files) == 11
    for f in files:
        assert (tmp_path / "x" / f).read_bytes() == (tmp_path / "y" / f).read_bytes()


def test_gen_corpus_too_small(capsys, tmp_path):
    (tmp_path / "c").mkdir()
    for i in range(3):
        (tmp_path / "c" / f"{i}.txt").write_text("One sentence. " * 12)
    assert run(capsys, "gen", "--corpus", tmp_path / "c", "--out", tmp_path / "o")[0] == EXIT_DATA
    assert run(capsys, "gen", "--corpus", tmp_path / "missing", "--out", tmp_path / "o")[0] == EXIT_DATA


def test_idf_header(capsys, tmp_path):
    corpus = tmp_path / "c"
    corpus.mkdir()
    for i in range(500):
        (corpus / f"{i:03d}.txt").write_text(f"common words here. unique{i} token.")
    code, _, _ = run(capsys, "idf", "--corpus", corpus, "--out", tmp_path / "idf.txt")
    lines = (tmp_path / "idf.txt").read_text().splitlines()
    assert code == EXIT_OK and lines[0] == "#documents 500"
    assert "common 500" in lines and "unique7 1" in lines


def test_audit(capsys, workspace):
    code, out, _ = run(capsys, "audit", workspace / "ds", "--folds", "4")
    rec = json.loads(out.splitlines()[1])
    assert code == EXIT_OK and rec["accuracy"] > 0.99
    assert run(capsys, "audit", workspace / "ds", "--folds", "1")[0] == EXIT_USAGE


def test_console_entry_point(fixtures):
    out = subprocess.run([sys.executable, "-m", "vecseg", "segment", str(fixtures / "aaabbcccdd.txt"),
                          "--level", "char", "--scorer", "euclidean", "-K", "4",
                          "--embeddings", str(fixtures / "onehot.txt")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["boundaries"] == [3, 5, 8, 10]
