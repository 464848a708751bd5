"""Cluster corpora, leak-free splits, and the per-sentence reference predictor.

Not every sentence admits equally diverse paraphrases, so control values
should be chosen relative to each sentence's typical quality. The
reference predictor approximates that typical quality from surface
features, trained on (source sentence, measured pair quality) samples.
"""

import numpy as np

from qcpg_kit import (
    evaluate_mse,
    fit,
    pair_count,
    paraphrase_corpus,
    predict,
    quality_samples,
    split_clusters,
)

# a synthetic corpus whose cluster members fan out in quality; jitter
# varies sentence length across clusters so length features carry signal
corpus = paraphrase_corpus(n_clusters=30, cluster_size=5, seed=12, length_jitter=6)
cluster = corpus[0]
print("cluster", cluster.cluster_id, "has", len(cluster.sentences), "members, e.g.:")
for s in cluster.sentences[:3]:
    print("  ", s)

print()
print("== leak-free splitting ==")
total_pairs = sum(pair_count(c) for c in corpus)
print("corpus pairs (unordered):", total_pairs)
split = split_clusters(corpus, sizes=(120, 30, 30), seed=42)
for name, pairs in (("train", split.train), ("dev", split.dev), ("test", split.test)):
    print(f"  {name:5s}: {len(pairs):4d} pairs across {len({p.cluster_id for p in pairs})} clusters")
train_ids = {p.cluster_id for p in split.train}
dev_ids = {p.cluster_id for p in split.dev}
test_ids = {p.cluster_id for p in split.test}
print("cluster overlap between any two splits:", train_ids & dev_ids | train_ids & test_ids | dev_ids & test_ids)

print()
print("== fitting the reference predictor ==")
train_clusters = [c for c in corpus if c.cluster_id in train_ids]
dev_clusters = [c for c in corpus if c.cluster_id in dev_ids]
train_samples = quality_samples(train_clusters)
dev_samples = quality_samples(dev_clusters)
print("training samples:", len(train_samples))

model = fit(train_samples, lam=1.0)
mse = evaluate_mse(model, dev_samples)
print("dev MSE (sem, syn, lex): %.1f  %.1f  %.1f" % mse)

targets = np.array([q.as_tuple() for _, q in train_samples])
baseline = ((np.array([q.as_tuple() for _, q in dev_samples]) - targets.mean(0)) ** 2).mean(0)
print("mean-predictor MSE:      %.1f  %.1f  %.1f" % tuple(baseline))

print()
print("== per-sentence references ==")
for cluster in dev_clusters:
    s = cluster.sentences[0]
    r = predict(model, s)
    print(f"  r(s) = ({r.sem:5.1f}, {r.syn:5.1f}, {r.lex:5.1f})   s = {s[:44]}...")
print("(downstream, control = quantized r(s) + offset)")
