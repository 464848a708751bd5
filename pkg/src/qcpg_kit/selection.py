"""Offset grid search and operation-point selection.

For each candidate offset o, the expected quality Q~(o) is estimated by
averaging, over a dev set, the measured quality of what the generator
produces when asked for control = reference(s) + o. Responsiveness
R(o) = Q~(o) - Q~(0,0,0) quantifies how much the generator actually
moves. The selected operation point maximizes linguistic diversity
(mean of the syntactic and lexical components) subject to a semantic
floor above a baseline.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Cluster
from .errors import (
    AllGenerationsFailed,
    MissingTree,
    MissingZeroPoint,
    NoFeasibleOffset,
    QcpgError,
)
from .generators import RETRIEVAL_ORACLE, GeneratorSpec, build_generator
from .quality import ControlVector, Offset, QualityComputer, QualityVector, quantize
from .reference import ReferenceModel, predict
from .semantic import DEFAULT_SCORER, SemanticScorer
from .util import thread_budget

log = logging.getLogger(__name__)

# (sentence, cluster context or None, bracketed tree of the sentence)
DevItem = tuple[str, "Cluster | None", str]


@dataclass
class GridResult:
    """Per-offset estimates over a fixed dev set, in lexicographic offset order."""

    offsets: list[Offset]
    q_tilde: list[QualityVector]
    responsiveness: list[tuple[float, float, float]]
    n: list[int]
    dim_std: tuple[float, float, float] | None = None
    dropped: list[Offset] = field(default_factory=list)


@dataclass(frozen=True)
class OperationPoint:
    offset: Offset
    expected: QualityVector
    diversity: float


@dataclass(frozen=True)
class SelectionConstraint:
    """Feasibility floor: expected semantic score must beat the baseline by the margin."""

    baseline_sem: float
    min_sem_advantage: float = 5.0


def default_grid(lo: float = 0.0, step: float = 5.0, hi: float = 50.0) -> list[Offset]:
    """The standard search grid: {lo, lo+step, ..., hi} in all three dimensions."""
    if step <= 0:
        raise ValueError("step must be positive")
    values = []
    v = lo
    while v <= hi + 1e-9:
        values.append(round(v, 9))
        v += step
    return [Offset(*t) for t in itertools.product(values, values, values)]


def diversity_of(q: QualityVector) -> float:
    return (q.syn + q.lex) / 2.0


class _GridEvaluator:
    """Shared state for evaluating many offsets over one dev set."""

    def __init__(self, gen: GeneratorSpec, qp_model: ReferenceModel, dev, scorer: SemanticScorer):
        self.dev: list[DevItem] = list(dev)
        if not self.dev:
            raise ValueError("dev set must be non-empty")
        self.computer = QualityComputer(scorer)
        self.spec = gen
        self.generator = build_generator(gen, scorer, quality=self.computer)
        self.refs = [predict(qp_model, s).as_tuple() for s, _, _ in self.dev]
        self.use_fast = gen.kind == RETRIEVAL_ORACLE
        self._tables = None

    # -- generic path ---------------------------------------------------

    def _resolve_target_tree(self, t: str, s: str, cluster: Cluster | None, tree_s: str) -> str:
        if t == s:
            return tree_s
        if cluster is not None and cluster.trees is not None:
            try:
                return cluster.trees[cluster.sentences.index(t)]
            except ValueError:
                pass
        raise MissingTree(f"no parse available for generated sentence {t[:60]!r}")

    def evaluate(self, o: Offset):
        """Mean quality and success count at offset ``o``; None if all fail."""
        if self.use_fast:
            return self._evaluate_fast(o)
        rows = []
        for (s, cluster, tree_s), r in zip(self.dev, self.refs):
            c = ControlVector(
                quantize(r[0] + o.sem), quantize(r[1] + o.syn), quantize(r[2] + o.lex)
            )
            try:
                t = self.generator.generate(s, c, cluster)
                tree_t = self._resolve_target_tree(t, s, cluster, tree_s)
                q = self.computer.pair_quality(s, t, tree_s, tree_t)
            except QcpgError as exc:
                log.warning("generation failed for %r at offset %s: %s", s[:40], o.as_tuple(), exc)
                continue
            rows.append(q.as_tuple())
        if not rows:
            return None
        mean = np.array(rows, dtype=np.float64).mean(axis=0)
        return QualityVector(*mean), len(rows)

    # -- vectorized retrieval-oracle path --------------------------------

    def _candidate_tables(self):
        if self._tables is None:
            per_item = []
            for s, cluster, _ in self.dev:
                try:
                    per_item.append(self.generator.candidate_qualities(s, cluster))
                except QcpgError as exc:
                    # mirrors the generic path, where such an item fails at every offset
                    log.warning("dev sentence %r excluded from grid: %s", s[:40], exc)
                    per_item.append(None)
            usable = [i for i, cands in enumerate(per_item) if cands]
            width = max((len(per_item[i]) for i in usable), default=1)
            # padded slots get a huge sentinel so argmin never selects them
            qualities = np.full((len(usable), width, 3), 1e18)
            refs = np.array([self.refs[i] for i in usable], dtype=np.float64)
            for row, i in enumerate(usable):
                for k, (_, _, _, q) in enumerate(per_item[i]):
                    qualities[row, k] = q.as_tuple()
            self._tables = (refs, qualities)
        return self._tables

    def _evaluate_fast(self, o: Offset):
        refs, qualities = self._candidate_tables()
        if len(refs) == 0:
            return None
        controls = np.array(
            [
                (quantize(r[0] + o.sem), quantize(r[1] + o.syn), quantize(r[2] + o.lex))
                for r in refs
            ],
            dtype=np.float64,
        )
        dist = ((qualities - controls[:, None, :]) ** 2).sum(axis=2)
        chosen = qualities[np.arange(len(refs)), dist.argmin(axis=1)]
        mean = chosen.mean(axis=0)
        return QualityVector(*mean), len(refs)

    # -- std units --------------------------------------------------------

    def dim_std(self) -> tuple[float, float, float]:
        """Population std, per dimension, of the dev set's own pair qualities."""
        rows = []
        for s, cluster, _ in self.dev:
            if cluster is None or cluster.trees is None or s not in cluster.sentences:
                continue
            tree_s = cluster.trees[cluster.sentences.index(s)]
            for i, t in enumerate(cluster.sentences):
                if t == s:
                    continue
                rows.append(self.computer.pair_quality(s, t, tree_s, cluster.trees[i]).as_tuple())
        if not rows:
            log.warning("dev set has no ground-truth pairs; std units default to 1.0")
            return (1.0, 1.0, 1.0)
        std = np.array(rows, dtype=np.float64).std(axis=0)
        return tuple(float(v) if v > 0 else 1.0 for v in std)


def expected_quality(
    gen: GeneratorSpec,
    qp_model: ReferenceModel,
    dev,
    o: Offset,
    scorer: SemanticScorer = DEFAULT_SCORER,
) -> tuple[QualityVector, int]:
    """Estimate Q~(o): the dev-set mean of q(s, generate(s, r(s)+o))."""
    result = _GridEvaluator(gen, qp_model, dev, scorer).evaluate(o)
    if result is None:
        raise AllGenerationsFailed(f"no dev sentence produced a usable generation at {o.as_tuple()}")
    return result


def grid_search(
    gen: GeneratorSpec,
    qp_model: ReferenceModel,
    dev,
    grid: list[Offset] | None = None,
    scorer: SemanticScorer = DEFAULT_SCORER,
    threads: int | None = None,
) -> GridResult:
    """Evaluate Q~ and responsiveness on every grid offset.

    The grid must contain the zero offset: all responsiveness values are
    differences against that single cached evaluation, so R(0,0,0) is
    exactly (0, 0, 0). Offsets are processed (and reported) in
    lexicographic order; offsets where every generation fails are dropped
    with a warning and listed in ``dropped``.
    """
    offsets = sorted({o.as_tuple() for o in (grid if grid is not None else default_grid())})
    if (0.0, 0.0, 0.0) not in offsets:
        raise MissingZeroPoint("the offset grid must include (0, 0, 0)")
    offsets = [Offset(*t) for t in offsets]

    ev = _GridEvaluator(gen, qp_model, dev, scorer)
    dim_std = ev.dim_std()

    workers = thread_budget(threads)
    if workers > 1 and not ev.use_fast:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evaluated = list(pool.map(ev.evaluate, offsets))
    else:
        evaluated = [ev.evaluate(o) for o in offsets]

    zero_idx = offsets.index(Offset(0.0, 0.0, 0.0))
    if evaluated[zero_idx] is None:
        raise AllGenerationsFailed("every generation failed at the zero offset")
    q0 = evaluated[zero_idx][0]

    result = GridResult(offsets=[], q_tilde=[], responsiveness=[], n=[], dim_std=dim_std)
    for o, entry in zip(offsets, evaluated):
        if entry is None:
            log.warning("offset %s dropped: all generations failed", o.as_tuple())
            result.dropped.append(o)
            continue
        q, count = entry
        result.offsets.append(o)
        result.q_tilde.append(q)
        result.responsiveness.append((q.sem - q0.sem, q.syn - q0.syn, q.lex - q0.lex))
        result.n.append(count)
    return result


def responsiveness(result: GridResult, o: Offset, std_units: bool = False) -> tuple[float, float, float]:
    """R(o) = Q~(o) - Q~(0,0,0), optionally in per-dimension std units."""
    tuples = [x.as_tuple() for x in result.offsets]
    if (0.0, 0.0, 0.0) not in tuples:
        raise MissingZeroPoint("grid result does not contain the zero offset")
    try:
        idx = tuples.index(o.as_tuple())
    except ValueError:
        raise ValueError(f"offset {o.as_tuple()} was not evaluated") from None
    r = result.responsiveness[idx]
    if not std_units:
        return r
    std = result.dim_std or (1.0, 1.0, 1.0)
    return tuple(v / s for v, s in zip(r, std))


def select_operation_point(result: GridResult, constraint: SelectionConstraint) -> OperationPoint:
    """Constrained argmax over grid rows.

    Among offsets whose expected semantic score clears the baseline plus
    margin, pick the one maximizing diversity; ties break toward higher
    semantic score, then smaller L1 offset norm, then lexicographically
    smaller offset.
    """
    if not result.offsets:
        raise ValueError("grid result is empty")
    floor = constraint.baseline_sem + constraint.min_sem_advantage
    best = None
    best_key = None
    max_sem = float("-inf")
    for o, q in zip(result.offsets, result.q_tilde):
        max_sem = max(max_sem, q.sem)
        if q.sem < floor:
            continue
        div = diversity_of(q)
        key = (-div, -q.sem, sum(abs(v) for v in o.as_tuple()), o.as_tuple())
        if best_key is None or key < best_key:
            best, best_key = (o, q, div), key
    if best is None:
        raise NoFeasibleOffset(
            f"no offset reaches semantic score {floor:.4f}", max_sem=max_sem
        )
    return OperationPoint(offset=best[0], expected=best[1], diversity=best[2])


HEATMAP_COLUMNS = (
    "o_sem", "o_syn", "o_lex",
    "q_sem", "q_syn", "q_lex",
    "r_sem", "r_syn", "r_lex",
    "diversity", "n",
)


def export_heatmap_csv(result: GridResult, path) -> None:
    """Write one CSV row per offset (4-decimal fixed point, sorted by offset)."""
    order = sorted(range(len(result.offsets)), key=lambda i: result.offsets[i].as_tuple())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(HEATMAP_COLUMNS) + "\n")
        for i in order:
            o = result.offsets[i]
            q = result.q_tilde[i]
            r = result.responsiveness[i]
            values = [
                *o.as_tuple(),
                q.sem, q.syn, q.lex,
                *r,
                diversity_of(q),
            ]
            fh.write(",".join(f"{v:.4f}" for v in values) + f",{result.n[i]}\n")


def read_heatmap_csv(path) -> GridResult:
    """Load an exported heatmap back into a GridResult (std units are not stored)."""
    result = GridResult(offsets=[], q_tilde=[], responsiveness=[], n=[])
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != list(HEATMAP_COLUMNS):
            raise ValueError(f"unexpected heatmap header: {header!r}")
        for line in fh:
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(",")
            values = [float(v) for v in fields[:10]]
            result.offsets.append(Offset(*values[0:3]))
            result.q_tilde.append(QualityVector(*values[3:6]))
            result.responsiveness.append(tuple(values[6:9]))
            result.n.append(int(fields[10]))
    return result
