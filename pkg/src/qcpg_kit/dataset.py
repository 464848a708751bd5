"""Cluster corpora: ingestion, pair extraction, subsampling, leak-free splits.

A corpus is a list of clusters, each holding mutually-paraphrastic
sentences (optionally with aligned bracketed parses). Splits assign
whole clusters to test, then dev, then train, so no cluster ever
contributes pairs to two splits.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .errors import InsufficientData, MalformedRecord, TreeLengthMismatch
from .util import rng_for

log = logging.getLogger(__name__)

ALL_ORDERED = "all_ordered"
ALL_UNORDERED = "all_unordered"
STAR_FIRST = "star_first"
PAIR_MODES = (ALL_ORDERED, ALL_UNORDERED, STAR_FIRST)


@dataclass
class Cluster:
    """A group of sentences annotated as mutual paraphrases."""

    cluster_id: str
    sentences: list[str]
    trees: list[str] | None = None

    def __post_init__(self):
        if not self.sentences:
            raise ValueError(f"cluster {self.cluster_id!r} has no sentences")
        if self.trees is not None and len(self.trees) != len(self.sentences):
            raise ValueError(
                f"cluster {self.cluster_id!r} has {len(self.trees)} trees "
                f"for {len(self.sentences)} sentences"
            )


@dataclass(frozen=True)
class SentencePair:
    source: str
    target: str
    cluster_id: str
    source_tree: str | None = None
    target_tree: str | None = None


@dataclass
class DatasetSplit:
    train: list[SentencePair] = field(default_factory=list)
    dev: list[SentencePair] = field(default_factory=list)
    test: list[SentencePair] = field(default_factory=list)
    seed: int = 0


def load_clusters(path) -> list[Cluster]:
    """Read a JSON-lines cluster file, preserving record order.

    Each line is ``{"cluster_id": str, "sentences": [...], "trees": [...]?}``;
    blank lines are skipped.
    """
    clusters = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"invalid JSON: {exc.msg}", line=lineno) from None
            if not isinstance(rec, dict):
                raise MalformedRecord("record is not a JSON object", line=lineno)
            cid = rec.get("cluster_id")
            sentences = rec.get("sentences")
            if not isinstance(cid, str) or not cid:
                raise MalformedRecord("missing or invalid 'cluster_id'", line=lineno)
            if (
                not isinstance(sentences, list)
                or not sentences
                or not all(isinstance(s, str) for s in sentences)
            ):
                raise MalformedRecord("missing or invalid 'sentences'", line=lineno)
            trees = rec.get("trees")
            if trees is not None:
                if not isinstance(trees, list) or not all(isinstance(t, str) for t in trees):
                    raise MalformedRecord("'trees' must be a list of strings", line=lineno)
                if len(trees) != len(sentences):
                    raise TreeLengthMismatch(
                        f"{len(trees)} trees for {len(sentences)} sentences", line=lineno
                    )
            clusters.append(Cluster(cid, list(sentences), list(trees) if trees else None))
    return clusters


def save_clusters(clusters: list[Cluster], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in clusters:
            rec = {"cluster_id": c.cluster_id, "sentences": c.sentences}
            if c.trees is not None:
                rec["trees"] = c.trees
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def pair_count(cluster: Cluster, mode: str = ALL_UNORDERED) -> int:
    n = len(cluster.sentences)
    if mode == ALL_ORDERED:
        return n * (n - 1)
    if mode == ALL_UNORDERED:
        return n * (n - 1) // 2
    if mode == STAR_FIRST:
        return n - 1
    raise ValueError(f"unknown pair mode {mode!r}")


def _cluster_pairs(cluster: Cluster, mode: str):
    n = len(cluster.sentences)
    if mode == ALL_ORDERED:
        index_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    elif mode == ALL_UNORDERED:
        index_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif mode == STAR_FIRST:
        index_pairs = [(0, j) for j in range(1, n)]
    else:
        raise ValueError(f"unknown pair mode {mode!r}")
    trees = cluster.trees
    for i, j in index_pairs:
        yield SentencePair(
            source=cluster.sentences[i],
            target=cluster.sentences[j],
            cluster_id=cluster.cluster_id,
            source_tree=trees[i] if trees else None,
            target_tree=trees[j] if trees else None,
        )


def extract_pairs(clusters: list[Cluster], mode: str = ALL_ORDERED) -> list[SentencePair]:
    """All intra-cluster sentence pairs, cluster by cluster."""
    pairs = []
    for cluster in clusters:
        pairs.extend(_cluster_pairs(cluster, mode))
    return pairs


def split_clusters(
    clusters: list[Cluster],
    sizes: tuple[int, int, int],
    seed: int,
    mode: str = ALL_UNORDERED,
) -> DatasetSplit:
    """Shuffle clusters and fill test, then dev, then train pair quotas.

    Whole clusters are assigned greedily until each split's pair count
    reaches its quota, so a split may overshoot by at most one cluster's
    pairs and no cluster ever straddles two splits. Deterministic for a
    fixed seed; leftover clusters are unused.
    """
    n_train, n_dev, n_test = sizes
    if min(sizes) < 0:
        raise ValueError("split sizes must be non-negative")
    order = rng_for(seed, "split_clusters").permutation(len(clusters))
    shuffled = [clusters[i] for i in order]

    quotas = [("test", n_test), ("dev", n_dev), ("train", n_train)]
    assigned: dict[str, list[Cluster]] = {"train": [], "dev": [], "test": []}
    counts = {"train": 0, "dev": 0, "test": 0}
    it = iter(shuffled)
    for name, quota in quotas:
        while counts[name] < quota:
            cluster = next(it, None)
            if cluster is None:
                achieved = tuple(counts[k] for k in ("train", "dev", "test"))
                raise InsufficientData(
                    f"corpus exhausted while filling the {name} split", achievable=achieved
                )
            assigned[name].append(cluster)
            counts[name] += pair_count(cluster, mode)

    split = DatasetSplit(seed=seed)
    split.test = extract_pairs(assigned["test"], mode)
    split.dev = extract_pairs(assigned["dev"], mode)
    split.train = extract_pairs(assigned["train"], mode)
    _assert_leak_free(assigned)
    return split


def _assert_leak_free(assigned: dict[str, list[Cluster]]) -> None:
    ids = {name: {c.cluster_id for c in cs} for name, cs in assigned.items()}
    for a in ("train", "dev", "test"):
        for b in ("train", "dev", "test"):
            if a < b and ids[a] & ids[b]:
                raise AssertionError(f"cluster leak between {a} and {b}: {ids[a] & ids[b]}")


def subsample(
    clusters: list[Cluster],
    n_pairs: int,
    seed: int,
    mode: str = ALL_UNORDERED,
) -> list[Cluster]:
    """Seeded shuffle, then take whole clusters until >= n_pairs pairs."""
    if n_pairs < 0:
        raise ValueError("n_pairs must be >= 0")
    if n_pairs == 0:
        return []
    order = rng_for(seed, "subsample").permutation(len(clusters))
    taken, total = [], 0
    for i in order:
        if total >= n_pairs:
            break
        taken.append(clusters[i])
        total += pair_count(clusters[i], mode)
    if total < n_pairs:
        log.warning("corpus has only %d pairs; %d requested", total, n_pairs)
    return taken


# --- pair TSV and tree sidecar files -----------------------------------------

def write_pairs_tsv(pairs: list[SentencePair], path) -> None:
    """`source<TAB>target<TAB>cluster_id[<TAB>source_tree<TAB>target_tree]` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fields = [p.source, p.target, p.cluster_id]
            if p.source_tree is not None and p.target_tree is not None:
                fields += [p.source_tree, p.target_tree]
            fh.write("\t".join(fields) + "\n")


def read_pairs_tsv(path) -> list[SentencePair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) == 3:
                pairs.append(SentencePair(*fields))
            elif len(fields) == 5:
                pairs.append(SentencePair(*fields[:3], fields[3] or None, fields[4] or None))
            else:
                raise MalformedRecord(
                    f"expected 3 or 5 tab-separated fields, got {len(fields)}", line=lineno
                )
    return pairs


def read_tree_sidecar(path) -> list[str | None]:
    """One bracketed tree per line, aligned with a sentence file; blank = missing."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() or None for line in fh.read().splitlines()]
