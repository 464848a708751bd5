"""Quality vectors, 20-level quantization, and control-token encoding.

The quality of a paraphrase is a 3-vector (semantic similarity,
syntactic distance, lexical distance), each on a 0-100 scale. Control
inputs for a generator are quality vectors quantized onto the 20-value
grid {0, 5, ..., 95} and rendered as three special tokens prepended to
the input sentence.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import MalformedControlPrefix, NonFiniteValue
from .semantic import DEFAULT_SCORER, SemanticScorer, semantic_similarity
from .trees import ParseTree, parse_bracketed, syntactic_distance
from .lexical import lexical_distance

QUANT_STEP = 5
QUANT_BINS = 20
QUANT_VALUES = tuple(range(0, QUANT_BINS * QUANT_STEP, QUANT_STEP))  # 0, 5, ..., 95


def _check_score(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NonFiniteValue(f"{name} must be finite, got {value!r}")
    if not 0.0 <= value <= 100.0:
        raise ValueError(f"{name} must lie in [0, 100], got {value!r}")
    return value


@dataclass(frozen=True)
class QualityVector:
    """(semantic, syntactic, lexical) scores, each in [0, 100]."""

    sem: float
    syn: float
    lex: float

    def __post_init__(self):
        object.__setattr__(self, "sem", _check_score("sem", self.sem))
        object.__setattr__(self, "syn", _check_score("syn", self.syn))
        object.__setattr__(self, "lex", _check_score("lex", self.lex))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sem, self.syn, self.lex)


@dataclass(frozen=True)
class ControlVector:
    """Quantized control target; every component is in {0, 5, ..., 95}."""

    sem: int
    syn: int
    lex: int

    def __post_init__(self):
        for name in ("sem", "syn", "lex"):
            v = getattr(self, name)
            if v not in QUANT_VALUES:
                raise ValueError(f"{name}={v!r} is not an admissible quantized value")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.sem, self.syn, self.lex)


@dataclass(frozen=True)
class Offset:
    """Displacement added to a reference point to form a control vector."""

    sem: float = 0.0
    syn: float = 0.0
    lex: float = 0.0

    def __post_init__(self):
        for name in ("sem", "syn", "lex"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise NonFiniteValue(f"offset {name} must be finite")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sem, self.syn, self.lex)


ZERO_OFFSET = Offset(0.0, 0.0, 0.0)


def quantize(v: float) -> int:
    """Map a value to the 20-bin grid: clamp to [0, 100], floor to a bin."""
    v = float(v)
    if not math.isfinite(v):
        raise NonFiniteValue(f"cannot quantize non-finite value {v!r}")
    v = min(max(v, 0.0), 100.0)
    return min(int(v // QUANT_STEP), QUANT_BINS - 1) * QUANT_STEP


def encode_control(c: ControlVector) -> str:
    return f"<sem_{c.sem}> <syn_{c.syn}> <lex_{c.lex}>"


def prepend_control(sentence: str, c: ControlVector) -> str:
    return f"{encode_control(c)} {sentence}"


_CONTROL_RE = re.compile(r"^<sem_(\d{1,2})> <syn_(\d{1,2})> <lex_(\d{1,2})>(?: (.*))?$", re.DOTALL)


def decode_control(text: str) -> tuple[ControlVector, str]:
    """Parse a control prefix back into the vector and remaining sentence."""
    m = _CONTROL_RE.match(text)
    if not m:
        raise MalformedControlPrefix(f"text does not start with control tokens: {text[:60]!r}")
    values = tuple(int(g) for g in m.group(1, 2, 3))
    if any(v not in QUANT_VALUES for v in values):
        raise MalformedControlPrefix(f"control values {values} are not on the quantized grid")
    return ControlVector(*values), m.group(4) or ""


def apply_offset(r: QualityVector, o: Offset) -> ControlVector:
    """Quantized control for reference point ``r`` displaced by ``o``."""
    return ControlVector(
        quantize(r.sem + o.sem),
        quantize(r.syn + o.syn),
        quantize(r.lex + o.lex),
    )


def quality_vector(
    s: str,
    t: str,
    tree_s: ParseTree,
    tree_t: ParseTree,
    scorer: SemanticScorer = DEFAULT_SCORER,
) -> QualityVector:
    """Measure the full 3-D quality of ``t`` as a paraphrase of ``s``."""
    return QualityVector(
        semantic_similarity(scorer.raw(s, t)),
        syntactic_distance(tree_s, tree_t),
        lexical_distance(s, t),
    )


class QualityComputer:
    """Memoizing front end for pair qualities.

    Grid search evaluates the same (sentence, candidate) pairs at every
    offset; caching by the pair's text makes those lookups free. Tree
    arguments are bracketed strings so the cache key is hashable and the
    parse is shared. Safe for concurrent readers; duplicated computation
    under races is idempotent.
    """

    def __init__(self, scorer: SemanticScorer = DEFAULT_SCORER):
        self.scorer = scorer
        self._trees: dict[str, ParseTree] = {}
        self._pairs: dict[tuple[str, str, str, str], QualityVector] = {}

    def tree(self, text: str) -> ParseTree:
        cached = self._trees.get(text)
        if cached is None:
            cached = self._trees[text] = parse_bracketed(text)
        return cached

    def pair_quality(self, s: str, t: str, tree_s: str, tree_t: str) -> QualityVector:
        key = (s, t, tree_s, tree_t)
        cached = self._pairs.get(key)
        if cached is None:
            cached = self._pairs[key] = quality_vector(
                s, t, self.tree(tree_s), self.tree(tree_t), self.scorer
            )
        return cached
