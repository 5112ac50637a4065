import numpy as np
import pytest

from helpers import random_qrels, random_run
from rankpipe.errors import DataError, FormatError
from rankpipe.fusion import cut_pool, fuse, normalize_run
from rankpipe.metrics import recall_at_k
from rankpipe.runs import Run, read_run, write_run


class TestRunIO:
    def test_write_read_round_trip_byte_identical(self, tmp_path):
        run = Run.from_scores({"q1": {"d1": 2.5, "d2": 1.0}, "q2": {"d3": 0.125}}, tag="sys")
        first = tmp_path / "a.trec"
        second = tmp_path / "b.trec"
        write_run(run, str(first))
        write_run(read_run(str(first)), str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_rank_column_starts_at_one(self, tmp_path):
        run = Run.from_scores({"q1": {"d1": 2.0, "d2": 1.0}})
        path = tmp_path / "r.trec"
        write_run(run, str(path))
        lines = path.read_text().splitlines()
        assert lines[0].split()[3] == "1"
        assert lines[1].split()[3] == "2"

    def test_duplicate_doc_rejected_on_read(self, tmp_path):
        path = tmp_path / "r.trec"
        path.write_text("q1 Q0 d1 1 2.0 t\nq1 Q0 d1 2 1.0 t\n")
        with pytest.raises(FormatError, match="duplicate"):
            read_run(str(path))

    def test_reader_canonicalizes_order(self, tmp_path):
        path = tmp_path / "r.trec"
        path.write_text("q1 Q0 d1 1 1.0 t\nq1 Q0 d2 2 5.0 t\n")
        run = read_run(str(path))
        assert run.docids("q1") == ["d2", "d1"]

    def test_header_comment_skipped(self, tmp_path):
        path = tmp_path / "r.trec"
        path.write_text("# provenance line\nq1 Q0 d1 1 1.0 t\n")
        assert read_run(str(path)).docids("q1") == ["d1"]

    def test_non_finite_score_rejected(self, tmp_path):
        path = tmp_path / "r.trec"
        path.write_text("q1 Q0 d1 1 nan t\n")
        with pytest.raises(FormatError, match="non-finite"):
            read_run(str(path))


class TestNormalizeRun:
    def test_affine_map(self):
        run = Run.from_scores({"q1": {"a": 2.0, "b": 4.0, "c": 6.0}})
        normalized = normalize_run(run)
        assert normalized.entries["q1"] == [("c", 1.0), ("b", 0.5), ("a", 0.0)]

    def test_single_entry_becomes_one(self):
        run = Run.from_scores({"q1": {"a": 3.7}})
        assert normalize_run(run).entries["q1"] == [("a", 1.0)]

    def test_argsort_never_changes(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            run = random_run(rng, n_queries=5, max_docs=10)
            normalized = normalize_run(run)
            for qid in run.entries:
                assert run.docids(qid) == normalized.docids(qid)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            normalize_run(Run(), method="zscore")


class TestFuse:
    def test_degenerate_weight_reproduces_first_run(self):
        rng = np.random.default_rng(0)
        run1 = random_run(rng, tag="a")
        run2 = random_run(rng, tag="b")
        fused = fuse([run1, run2], [1.0, 0.0])
        for qid in run1.entries:
            assert fused.docids(qid)[: len(run1.entries[qid])] == run1.docids(qid)

    def test_absent_document_contributes_zero(self):
        run1 = Run.from_scores({"q1": {"d": 1.0}})
        run2 = Run.from_scores({"q1": {"e": 1.0}})
        fused = fuse([run1, run2], [0.5, 0.5])
        assert fused.scores("q1")["d"] == 0.5

    def test_equal_weights_mean_matches_hand_arithmetic(self):
        rng = np.random.default_rng(7)
        docs = [f"d{i}" for i in range(10)]
        scores1 = {d: float(rng.uniform(0, 1)) for d in docs}
        scores2 = {d: float(rng.uniform(0, 1)) for d in docs}
        fused = fuse(
            [Run.from_scores({"q": scores1}), Run.from_scores({"q": scores2})], [0.5, 0.5]
        )
        for d in docs:
            assert fused.scores("q")[d] == pytest.approx(
                0.5 * scores1[d] + 0.5 * scores2[d], abs=1e-15
            )

    def test_permutation_symmetry(self):
        rng = np.random.default_rng(3)
        runs = [random_run(rng, tag=f"r{i}") for i in range(3)]
        weights = [0.5, 0.3, 0.2]
        forward = fuse(runs, weights)
        backward = fuse(runs[::-1], weights[::-1])
        assert forward.entries == backward.entries

    def test_single_normalized_run_reproduces_ranking(self):
        rng = np.random.default_rng(4)
        run = random_run(rng)
        fused = fuse([normalize_run(run)], [1.0])
        for qid in run.entries:
            assert fused.docids(qid) == run.docids(qid)

    def test_all_zero_weights_error(self):
        with pytest.raises(DataError):
            fuse([Run.from_scores({"q": {"d": 1.0}})], [0.0])

    def test_negative_weight_error(self):
        with pytest.raises(DataError):
            fuse([Run.from_scores({"q": {"d": 1.0}})], [-0.5])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fuse([Run.from_scores({"q": {"d": 1.0}})], [0.5, 0.5])

    def test_tag_is_hybrid(self):
        fused = fuse([Run.from_scores({"q": {"d": 1.0}})], [1.0])
        assert fused.tag == "hybrid"


class TestCutPool:
    def test_long_list_cut(self):
        run = Run.from_scores({"q": {f"d{i:03d}": 500.0 - i for i in range(500)}})
        pool = cut_pool(run, 200)
        assert len(pool.entries["q"]) == 200
        assert pool.docids("q") == run.docids("q")[:200]

    def test_short_list_kept_whole(self):
        run = Run.from_scores({"q": {f"d{i}": 50.0 - i for i in range(50)}})
        assert len(cut_pool(run, 200).entries["q"]) == 50

    def test_k_one_keeps_top_doc(self):
        run = Run.from_scores({"q": {"a": 1.0, "b": 9.0}})
        assert cut_pool(run, 1).docids("q") == ["b"]

    def test_prefix_of_larger_cut(self):
        rng = np.random.default_rng(2)
        run = random_run(rng, n_queries=4, max_docs=20, universe_size=40)
        small = cut_pool(run, 5)
        large = cut_pool(run, 12)
        for qid in run.entries:
            assert large.docids(qid)[:5][: len(small.docids(qid))] == small.docids(qid)

    def test_provenance_records_source_tag(self):
        run = Run.from_scores({"q": {"d": 1.0}}, tag="hybrid")
        assert cut_pool(run, 10).provenance == "hybrid"

    def test_pool_recall_monotone_in_k(self):
        rng = np.random.default_rng(9)
        run = random_run(rng, n_queries=6, max_docs=20, universe_size=25)
        qrels = random_qrels(rng, run)
        previous = -1.0
        for k in (1, 2, 5, 10, 20):
            recall = recall_at_k(cut_pool(run, k).to_run(), qrels, k).mean
            assert recall >= previous
            previous = recall
