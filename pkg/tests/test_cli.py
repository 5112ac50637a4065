import hashlib
import json
from pathlib import Path

import pytest

from rankpipe.cli import main
from rankpipe.errors import DataError
from rankpipe.expconfig import load_config
from rankpipe.pipeline import run_pipeline
from rankpipe.runs import read_run

DESK = Path(__file__).parent / "data" / "desk"


def write_tiny_project(root: Path) -> Path:
    """Two queries, six docs, complementary sparse/dense relevance."""
    docs = [
        {"docid": "d1", "title": "", "text": "albatross zephyr facts albatross zephyr"},
        {"docid": "d2", "title": "", "text": "nothing shared with queries here"},
        {"docid": "d3", "title": "", "text": "quasar obsidian notes quasar obsidian"},
        {"docid": "d4", "title": "", "text": "more filler text entirely"},
        {"docid": "d5", "title": "", "text": "albatross appears once only"},
        {"docid": "d6", "title": "", "text": "quasar appears once only"},
    ]
    (root / "corpus.jsonl").write_text(
        "".join(json.dumps(d) + "\n" for d in docs), encoding="utf-8"
    )
    (root / "topics.tsv").write_text("q1\talbatross zephyr\nq2\tquasar obsidian\n", encoding="utf-8")
    (root / "qrels.txt").write_text(
        "q1 Q0 d1 1\nq1 Q0 d2 1\nq2 Q0 d3 1\nq2 Q0 d4 1\n", encoding="utf-8"
    )
    (root / "queries.vec.tsv").write_text("q1\t1.0,0.0\nq2\t0.0,1.0\n", encoding="utf-8")
    doc_vecs = {"d1": "0.0,0.0", "d2": "1.0,0.0", "d3": "0.0,0.0", "d4": "0.0,1.0", "d5": "0.0,0.0", "d6": "0.0,0.0"}
    (root / "docs.vec.tsv").write_text(
        "".join(f"{d}\t{v}\n" for d, v in doc_vecs.items()), encoding="utf-8"
    )
    config = "\n".join(
        [
            "schema = rankpipe-exp-1",
            "seed = 7",
            "languages = xx",
            "stages = index,bm25,dense,fuse,pool,rerank,eval",
            "output_dir = out",
            "corpus.xx = corpus.jsonl",
            "topics.xx = topics.tsv",
            "qrels.xx = qrels.txt",
            "query_vectors.xx = queries.vec.tsv",
            "doc_vectors.xx = docs.vec.tsv",
            "retrieve.k = 6",
            "pool.k = 4",
            "eval.k = 3",
            "eval.recall_k = 4",
            "",
        ]
    )
    (root / "exp.cfg").write_text(config, encoding="utf-8")
    return root / "exp.cfg"


def tree_digest(root: Path) -> dict[str, str]:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestSubcommands:
    def test_index_retrieve_eval_flow(self, tmp_path, capsys):
        write_tiny_project(tmp_path)
        index_path = tmp_path / "idx.rpidx"
        run_path = tmp_path / "bm25.trec"
        assert main(["index", "build", "--corpus", str(tmp_path / "corpus.jsonl"), "--out", str(index_path)]) == 0
        assert main(
            ["retrieve", "bm25", "--index", str(index_path), "--topics", str(tmp_path / "topics.tsv"),
             "-k", "5", "--out", str(run_path)]
        ) == 0
        assert main(
            ["eval", "--run", str(run_path), "--qrels", str(tmp_path / "qrels.txt"), "--metric", "ndcg", "-k", "3"]
        ) == 0
        out = capsys.readouterr().out
        assert "ndcg@3" in out

    def test_retrieve_dense_and_fuse(self, tmp_path):
        write_tiny_project(tmp_path)
        dense_path = tmp_path / "dense.trec"
        assert main(
            ["retrieve", "dense", "--queries", str(tmp_path / "queries.vec.tsv"),
             "--docs", str(tmp_path / "docs.vec.tsv"), "--metric", "dot", "-k", "6",
             "--out", str(dense_path)]
        ) == 0
        index_path = tmp_path / "idx.rpidx"
        bm25_path = tmp_path / "bm25.trec"
        main(["index", "build", "--corpus", str(tmp_path / "corpus.jsonl"), "--out", str(index_path)])
        main(["retrieve", "bm25", "--index", str(index_path), "--topics", str(tmp_path / "topics.tsv"),
              "--out", str(bm25_path)])
        hybrid_path = tmp_path / "hybrid.trec"
        assert main(
            ["fuse", "--runs", str(bm25_path), str(dense_path), "--weights", "0.5,0.5",
             "--normalize", "minmax", "-k", "4", "--out", str(hybrid_path)]
        ) == 0
        hybrid = read_run(str(hybrid_path))
        assert hybrid.tag == "hybrid"
        assert set(hybrid.docids("q1")[:2]) == {"d1", "d2"}

    def test_forge_subcommands(self, tmp_path):
        write_tiny_project(tmp_path)
        pool_path = tmp_path / "pool.trec"
        pool_path.write_text(
            "q1 Q0 d1 1 3.0 hybrid\nq1 Q0 d2 2 2.0 hybrid\nq1 Q0 d5 3 1.0 hybrid\n"
        )
        out = tmp_path / "neg.pairs.tsv"
        assert main(
            ["forge", "negatives", "--pool", str(pool_path), "--qrels", str(tmp_path / "qrels.txt"),
             "--topics", str(tmp_path / "topics.tsv"), "-n", "2", "--seed", "5", "--out", str(out)]
        ) == 0
        assert out.read_text().count("negative") == 1  # d1, d2 are positives; only d5 eligible

        q2q_out = tmp_path / "q2q.pairs.tsv"
        assert main(
            ["forge", "q2q2d", "--test-topics", str(tmp_path / "topics.tsv"),
             "--train-topics", str(tmp_path / "topics.tsv"), "--train-qrels", str(tmp_path / "qrels.txt"),
             "--query-vectors", str(tmp_path / "queries.vec.tsv"), "--out", str(q2q_out)]
        ) == 0
        assert "q2q2d" in q2q_out.read_text()

        scored = tmp_path / "scored.trec"
        scored.write_text("q1 Q0 d1 1 0.9 model\nq1 Q0 d2 2 0.4 model\n")
        pseudo_out = tmp_path / "pseudo.pairs.tsv"
        assert main(
            ["forge", "pseudo", "--run", str(scored), "--topics", str(tmp_path / "topics.tsv"),
             "--fraction", "1.0", "--out", str(pseudo_out)]
        ) == 0
        lines = [l for l in pseudo_out.read_text().splitlines() if l]
        assert len(lines) == 2

    def test_rerank_and_ensemble(self, tmp_path):
        write_tiny_project(tmp_path)
        pool_path = tmp_path / "pool.trec"
        pool_path.write_text(
            "q1 Q0 d1 1 3.0 hybrid\nq1 Q0 d2 2 2.0 hybrid\n"
            "q2 Q0 d3 1 3.0 hybrid\nq2 Q0 d4 2 2.0 hybrid\n"
        )
        rerank_path = tmp_path / "rerank.trec"
        assert main(
            ["rerank", "--pool", str(pool_path), "--topics", str(tmp_path / "topics.tsv"),
             "--corpus", str(tmp_path / "corpus.jsonl"), "--scorer", "lexical", "--out", str(rerank_path)]
        ) == 0
        run = read_run(str(rerank_path))
        assert run.scores("q1")["d1"] == 1.0
        assert run.scores("q1")["d2"] == 0.0

        other = tmp_path / "other.trec"
        other.write_text(
            "q1 Q0 d1 1 0.9 x\nq1 Q0 d2 2 0.2 x\nq2 Q0 d3 1 0.8 x\nq2 Q0 d4 2 0.1 x\n"
        )
        ens_path = tmp_path / "ens.trec"
        assert main(
            ["ensemble", "--runs", str(rerank_path), str(other), "--base-weights", "0.802,0.730",
             "--lambda", "0.5", "--out", str(ens_path)]
        ) == 0
        assert read_run(str(ens_path)).tag == "ensemble"

    def test_stats_output(self, tmp_path, capsys):
        write_tiny_project(tmp_path)
        assert main(
            ["stats", "--corpus", str(tmp_path / "corpus.jsonl"), "--language", "xx",
             "--topics", f"train={tmp_path / 'topics.tsv'}", "--qrels", f"train={tmp_path / 'qrels.txt'}"]
        ) == 0
        out = capsys.readouterr().out
        assert "xx\t2\t4\t6\t-" in out


class TestValidateCommand:
    def test_clean_files_exit_zero(self, tmp_path):
        write_tiny_project(tmp_path)
        run_path = tmp_path / "ok.trec"
        run_path.write_text("q1 Q0 d1 1 2.0 t\nq1 Q0 d2 2 1.0 t\n")
        assert main(["validate", str(run_path), str(tmp_path / "qrels.txt"), str(tmp_path / "corpus.jsonl")]) == 0

    def test_duplicate_run_pair_reported(self, tmp_path, capsys):
        path = tmp_path / "dup.trec"
        path.write_text("q1 Q0 d1 1 2.0 t\nq1 Q0 d1 2 1.0 t\n")
        assert main(["validate", str(path)]) == 2
        assert "run.duplicate" in capsys.readouterr().out

    def test_negative_grade_reported(self, tmp_path, capsys):
        path = tmp_path / "bad.qrels"
        path.write_text("q1 Q0 d1 -2\n")
        assert main(["validate", str(path)]) == 2
        assert "qrels.grade" in capsys.readouterr().out

    def test_unknown_kind_needs_flag(self, tmp_path, capsys):
        path = tmp_path / "mystery.bin"
        path.write_text("x")
        assert main(["validate", str(path)]) == 2
        assert "kind" in capsys.readouterr().out


class TestExitCodes:
    def test_usage_error_is_one(self):
        with pytest.raises(SystemExit) as exc:
            main(["index", "build", "--corpus-missing-flag"])
        assert exc.value.code == 1

    def test_data_error_is_two(self, tmp_path):
        assert main(["eval", "--run", str(tmp_path / "missing.trec"), "--qrels", str(tmp_path / "missing.txt")]) == 2

    def test_protocol_error_is_three(self, tmp_path):
        write_tiny_project(tmp_path)
        pool_path = tmp_path / "pool.trec"
        pool_path.write_text("q1 Q0 d1 1 3.0 hybrid\n")
        code = main(
            ["rerank", "--pool", str(pool_path), "--topics", str(tmp_path / "topics.tsv"),
             "--corpus", str(tmp_path / "corpus.jsonl"), "--scorer", "cmd:/no/such/binary",
             "--out", str(tmp_path / "r.trec")]
        )
        assert code == 3


class TestConfig:
    def test_bad_schema_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("schema = other-1\nseed = 1\nlanguages = xx\nstages = index\noutput_dir = out\n")
        with pytest.raises(DataError, match="schema"):
            load_config(str(cfg))

    def test_unknown_stage_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("schema = rankpipe-exp-1\nseed = 1\nlanguages = xx\nstages = warp\noutput_dir = out\n")
        with pytest.raises(DataError, match="warp"):
            load_config(str(cfg))

    def test_missing_required_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("schema = rankpipe-exp-1\nseed = 1\nlanguages = xx\nstages = index\n")
        with pytest.raises(DataError, match="output_dir"):
            load_config(str(cfg))

    def test_paths_resolve_relative_to_config(self, tmp_path):
        cfg_path = write_tiny_project(tmp_path)
        config = load_config(str(cfg_path))
        assert config.lang_path("corpus", "xx") == tmp_path / "corpus.jsonl"


class TestPipeline:
    def test_full_run_and_metrics(self, tmp_path, capsys):
        cfg_path = write_tiny_project(tmp_path)
        assert main(["pipeline", "--config", str(cfg_path)]) == 0
        out = capsys.readouterr().out
        assert "hybrid" in out
        lang_dir = tmp_path / "out" / "xx"
        for name in ("index.rpidx", "bm25.trec", "dense.trec", "hybrid.trec", "pool.trec",
                     "rerank.trec", "metrics.tsv"):
            assert (lang_dir / name).exists()
        assert (tmp_path / "out" / "summary.tsv").exists()
        # both relevants (one lexical, one dense) must surface in the hybrid pool
        reports = read_run(str(lang_dir / "pool.trec"))
        assert {"d1", "d2"} <= set(reports.docids("q1"))

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg_path = write_tiny_project(tmp_path)
        config = load_config(str(cfg_path))
        run_pipeline(config)
        first = tree_digest(tmp_path / "out")
        run_pipeline(load_config(str(cfg_path)))
        assert tree_digest(tmp_path / "out") == first

    def test_missing_upstream_names_stage(self, tmp_path):
        cfg_path = write_tiny_project(tmp_path)
        text = cfg_path.read_text().replace(
            "stages = index,bm25,dense,fuse,pool,rerank,eval", "stages = fuse"
        )
        cfg_path.write_text(text)
        with pytest.raises(DataError, match="bm25"):
            run_pipeline(load_config(str(cfg_path)))

    def test_partial_stages_then_eval(self, tmp_path):
        cfg_path = write_tiny_project(tmp_path)
        text = cfg_path.read_text().replace(
            "stages = index,bm25,dense,fuse,pool,rerank,eval", "stages = index,bm25,eval"
        )
        cfg_path.write_text(text)
        reports = run_pipeline(load_config(str(cfg_path)))
        assert ("bm25", "ndcg", 3) in reports["xx"]
        assert ("hybrid", "ndcg", 3) not in reports["xx"]

    def test_threads_flag_gives_same_bytes(self, tmp_path):
        import shutil

        desk_copy = tmp_path / "desk"
        shutil.copytree(DESK, desk_copy)
        config = load_config(str(desk_copy / "desk.cfg"))
        run_pipeline(config, threads=1)
        first = tree_digest(desk_copy / "out")
        shutil.rmtree(desk_copy / "out")
        run_pipeline(load_config(str(desk_copy / "desk.cfg")), threads=3)
        assert tree_digest(desk_copy / "out") == first

    def test_composed_pipeline_equals_stage_by_stage_cli(self, tmp_path):
        cfg_path = write_tiny_project(tmp_path)
        run_pipeline(load_config(str(cfg_path)))
        lang_dir = tmp_path / "out" / "xx"

        index_path = tmp_path / "manual.rpidx"
        bm25_path = tmp_path / "manual.bm25.trec"
        dense_path = tmp_path / "manual.dense.trec"
        pool_path = tmp_path / "manual.pool.trec"
        assert main(["index", "build", "--corpus", str(tmp_path / "corpus.jsonl"), "--out", str(index_path)]) == 0
        assert main(["retrieve", "bm25", "--index", str(index_path), "--topics", str(tmp_path / "topics.tsv"),
                     "-k", "6", "--out", str(bm25_path)]) == 0
        assert main(["retrieve", "dense", "--queries", str(tmp_path / "queries.vec.tsv"),
                     "--docs", str(tmp_path / "docs.vec.tsv"), "-k", "6", "--out", str(dense_path)]) == 0
        assert main(["fuse", "--runs", str(bm25_path), str(dense_path), "--weights", "0.5,0.5",
                     "--normalize", "minmax", "-k", "4", "--out", str(pool_path)]) == 0

        assert read_run(str(bm25_path)).entries == read_run(str(lang_dir / "bm25.trec")).entries
        assert read_run(str(dense_path)).entries == read_run(str(lang_dir / "dense.trec")).entries
        assert read_run(str(pool_path)).entries == read_run(str(lang_dir / "pool.trec")).entries
