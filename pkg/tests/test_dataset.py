import json

import pytest

from qcpg_kit import (
    ALL_ORDERED,
    ALL_UNORDERED,
    STAR_FIRST,
    Cluster,
    extract_pairs,
    load_clusters,
    pair_count,
    read_pairs_tsv,
    read_tree_sidecar,
    split_clusters,
    subsample,
    write_pairs_tsv,
)
from qcpg_kit.errors import InsufficientData, MalformedRecord, TreeLengthMismatch


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")


def make_clusters(n, size=3):
    return [
        Cluster(f"c{i}", [f"s{i}_{j}" for j in range(size)]) for i in range(n)
    ]


class TestLoadClusters:
    def test_order_preserved(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [
                {"cluster_id": "a", "sentences": ["x", "y"]},
                {"cluster_id": "b", "sentences": ["z"], "trees": ["(A)"]},
            ],
        )
        clusters = load_clusters(path)
        assert [c.cluster_id for c in clusters] == ["a", "b"]
        assert clusters[1].trees == ["(A)"]

    def test_tree_length_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [
                {"cluster_id": "a", "sentences": ["x"]},
                {"cluster_id": "b", "sentences": ["x", "y"], "trees": ["(A)"]},
            ],
        )
        with pytest.raises(TreeLengthMismatch) as exc:
            load_clusters(path)
        assert exc.value.line == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_clusters(path) == []

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('\n{"cluster_id": "a", "sentences": ["x"]}\n\n', encoding="utf-8")
        assert len(load_clusters(path)) == 1

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"cluster_id": "a"\n', encoding="utf-8")
        with pytest.raises(MalformedRecord) as exc:
            load_clusters(path)
        assert exc.value.line == 1

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"sentences": ["x"]}\n', encoding="utf-8")
        with pytest.raises(MalformedRecord):
            load_clusters(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_clusters(tmp_path / "nope.jsonl")


class TestExtractPairs:
    def test_ordered_counts(self):
        cluster = Cluster("c", ["a", "b", "c"])
        assert len(extract_pairs([cluster], ALL_ORDERED)) == 6

    def test_unordered_counts(self):
        cluster = Cluster("c", ["a", "b", "c"])
        pairs = extract_pairs([cluster], ALL_UNORDERED)
        assert len(pairs) == 3
        assert {(p.source, p.target) for p in pairs} == {("a", "b"), ("a", "c"), ("b", "c")}

    def test_star_first(self):
        cluster = Cluster("c", ["a", "b", "c"])
        pairs = extract_pairs([cluster], STAR_FIRST)
        assert [(p.source, p.target) for p in pairs] == [("a", "b"), ("a", "c")]

    def test_singleton_yields_nothing(self):
        assert extract_pairs([Cluster("c", ["a"])], ALL_ORDERED) == []

    def test_trees_propagate(self):
        cluster = Cluster("c", ["a", "b"], trees=["(A)", "(B)"])
        pair = extract_pairs([cluster], ALL_UNORDERED)[0]
        assert (pair.source_tree, pair.target_tree) == ("(A)", "(B)")

    def test_pair_count_matches(self):
        cluster = Cluster("c", list("abcde"))
        for mode in (ALL_ORDERED, ALL_UNORDERED, STAR_FIRST):
            assert pair_count(cluster, mode) == len(extract_pairs([cluster], mode))


class TestSplitClusters:
    def test_exact_quota_fill(self):
        clusters = make_clusters(10, size=3)  # 3 unordered pairs each
        split = split_clusters(clusters, (18, 6, 6), seed=7)
        assert len(split.train) == 18 and len(split.dev) == 6 and len(split.test) == 6
        ids = lambda pairs: {p.cluster_id for p in pairs}
        assert len(ids(split.train)) == 6 and len(ids(split.dev)) == 2 and len(ids(split.test)) == 2
        assert not ids(split.train) & ids(split.dev)
        assert not ids(split.train) & ids(split.test)
        assert not ids(split.dev) & ids(split.test)

    def test_zero_sizes(self):
        split = split_clusters(make_clusters(4), (0, 0, 0), seed=1)
        assert split.train == [] and split.dev == [] and split.test == []

    def test_deterministic(self):
        clusters = make_clusters(12)
        a = split_clusters(clusters, (9, 3, 3), seed=5)
        b = split_clusters(clusters, (9, 3, 3), seed=5)
        assert a.train == b.train and a.dev == b.dev and a.test == b.test

    def test_different_seeds_differ(self):
        clusters = make_clusters(30)
        a = split_clusters(clusters, (30, 9, 9), seed=1)
        b = split_clusters(clusters, (30, 9, 9), seed=2)
        assert a.train != b.train or a.dev != b.dev or a.test != b.test

    def test_quota_overshoot_bounded(self):
        clusters = make_clusters(20, size=4)  # 6 unordered pairs each
        split = split_clusters(clusters, (20, 7, 7), seed=3)
        for pairs, quota in ((split.train, 20), (split.dev, 7), (split.test, 7)):
            assert quota <= len(pairs) < quota + 6

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData) as exc:
            split_clusters(make_clusters(2, size=2), (5, 1, 1), seed=1)
        assert len(exc.value.achievable) == 3

    def test_ordered_mode_quotas(self):
        clusters = make_clusters(6, size=3)  # 6 ordered pairs each
        split = split_clusters(clusters, (12, 6, 6), seed=11, mode=ALL_ORDERED)
        assert len(split.train) == 12 and len(split.dev) == 6 and len(split.test) == 6


class TestSubsample:
    def test_zero(self):
        assert subsample(make_clusters(5), 0, seed=1) == []

    def test_deterministic(self):
        clusters = make_clusters(10)
        assert subsample(clusters, 9, seed=4) == subsample(clusters, 9, seed=4)

    def test_takes_whole_clusters_until_quota(self):
        clusters = make_clusters(10, size=3)  # 3 unordered pairs each
        taken = subsample(clusters, 7, seed=2)
        total = sum(pair_count(c, ALL_UNORDERED) for c in taken)
        assert total >= 7
        assert total - 3 < 7  # one cluster fewer would be under quota

    def test_small_corpus_returns_everything(self):
        clusters = make_clusters(2, size=2)
        assert len(subsample(clusters, 100, seed=1)) == 2


class TestPairsTsv:
    def test_round_trip(self, tmp_path):
        cluster = Cluster("c9", ["a b", "c d"], trees=["(A (a) (b))", "(B (c) (d))"])
        pairs = extract_pairs([cluster], ALL_ORDERED)
        path = tmp_path / "pairs.tsv"
        write_pairs_tsv(pairs, path)
        assert read_pairs_tsv(path) == pairs

    def test_three_column_round_trip(self, tmp_path):
        pairs = extract_pairs([Cluster("k", ["x", "y"])], ALL_UNORDERED)
        path = tmp_path / "pairs.tsv"
        write_pairs_tsv(pairs, path)
        assert read_pairs_tsv(path) == pairs

    def test_bad_column_count(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("only\ttwo\n", encoding="utf-8")
        with pytest.raises(MalformedRecord):
            read_pairs_tsv(path)


class TestTreeSidecar:
    def test_blank_lines_are_missing(self, tmp_path):
        path = tmp_path / "trees.txt"
        path.write_text("(A)\n\n(B (C))\n", encoding="utf-8")
        assert read_tree_sidecar(path) == ["(A)", None, "(B (C))"]
