"""Controlled-generator interface and built-in test generators.

A generator maps (sentence, control vector) to a paraphrase. Besides
the external-command bridge for real trained models, the built-ins make
the selection machinery testable end to end without any training:

* identity        -- returns the input unchanged (control-blind baseline);
* retrieval_oracle -- returns the cluster member whose measured quality
  is nearest the requested control, i.e. a generator that conforms to
  the control as well as the data allows;
* noisy_oracle    -- the retrieval oracle with seeded Gaussian noise on
  the measured qualities, simulating an imperfect model.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Cluster
from .errors import EmptyContext, ProtocolError
from .quality import ControlVector, QualityComputer, prepend_control
from .semantic import DEFAULT_SCORER, SemanticScorer, run_line_protocol, sanitize_line_field
from .util import rng_for

IDENTITY = "identity"
RETRIEVAL_ORACLE = "retrieval_oracle"
NOISY_ORACLE = "noisy_oracle"
EXTERNAL_COMMAND = "external_command"
GENERATOR_KINDS = (IDENTITY, RETRIEVAL_ORACLE, NOISY_ORACLE, EXTERNAL_COMMAND)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = IDENTITY
    noise_std: float | None = None
    command: str | None = None
    seed: int = 42

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == NOISY_ORACLE and (self.noise_std is None or self.noise_std < 0):
            raise ValueError("noisy_oracle requires a non-negative noise_std")
        if self.kind == EXTERNAL_COMMAND and not self.command:
            raise ValueError("external_command generator requires a command string")


class IdentityGenerator:
    def generate(self, s: str, c: ControlVector, context: Cluster | None = None) -> str:
        return s


class RetrievalOracleGenerator:
    """Returns the cluster member with quality nearest the control.

    Distance is Euclidean over the 3 quality dimensions; ties go to the
    lowest cluster index. The source sentence itself is never returned.
    """

    def __init__(self, quality: QualityComputer | None = None):
        self.quality = quality or QualityComputer()

    def candidate_qualities(self, s: str, context: Cluster | None):
        """(index, sentence, tree, QualityVector) for every member != s."""
        if context is None:
            raise EmptyContext("retrieval oracle requires a cluster context")
        if context.trees is None:
            raise EmptyContext(
                f"cluster {context.cluster_id!r} has no trees; the oracle needs parses"
            )
        try:
            s_idx = context.sentences.index(s)
        except ValueError:
            raise EmptyContext(
                f"sentence is not a member of cluster {context.cluster_id!r}"
            ) from None
        tree_s = context.trees[s_idx]
        out = []
        for i, t in enumerate(context.sentences):
            if t == s:
                continue
            out.append((i, t, context.trees[i], self.quality.pair_quality(s, t, tree_s, context.trees[i])))
        if not out:
            raise EmptyContext(f"cluster {context.cluster_id!r} has no candidate other than the input")
        return out

    def generate(self, s: str, c: ControlVector, context: Cluster | None = None) -> str:
        best, best_d = None, None
        for _, t, _, q in self.candidate_qualities(s, context):
            d = (q.sem - c.sem) ** 2 + (q.syn - c.syn) ** 2 + (q.lex - c.lex) ** 2
            if best_d is None or d < best_d:
                best, best_d = t, d
        return best


class NoisyOracleGenerator(RetrievalOracleGenerator):
    """Retrieval oracle over noise-perturbed qualities; deterministic per seed."""

    def __init__(self, noise_std: float, seed: int = 42, quality: QualityComputer | None = None):
        super().__init__(quality)
        self.noise_std = noise_std
        self.seed = seed

    def generate(self, s: str, c: ControlVector, context: Cluster | None = None) -> str:
        candidates = self.candidate_qualities(s, context)
        rng = rng_for(self.seed, "noisy_oracle", s, c.sem, c.syn, c.lex)
        noise = rng.normal(0.0, self.noise_std, size=(len(candidates), 3))
        best, best_d = None, None
        for k, (_, t, _, q) in enumerate(candidates):
            d = (
                (q.sem + noise[k, 0] - c.sem) ** 2
                + (q.syn + noise[k, 1] - c.syn) ** 2
                + (q.lex + noise[k, 2] - c.lex) ** 2
            )
            if best_d is None or d < best_d:
                best, best_d = t, d
        return best


class ExternalCommandGenerator:
    """Bridge to an external generator speaking the control-token protocol."""

    def __init__(self, command: str):
        self.command = command

    def generate(self, s: str, c: ControlVector, context: Cluster | None = None) -> str:
        return external_generate(self.command, [(s, c)])[0]


def external_generate(command: str, batch: list[tuple[str, ControlVector]]) -> list[str]:
    """Run a batch through an external generator command.

    Protocol: each stdin line is the three control tokens followed by the
    sentence; stdout returns exactly one paraphrase per line.
    """
    lines = [prepend_control(sanitize_line_field(s), c) for s, c in batch]
    out = run_line_protocol(command, lines, "generator")
    for lineno, (text, (s, _)) in enumerate(zip(out, batch), start=1):
        if not text and s:
            raise ProtocolError("generator returned an empty paraphrase", line=lineno)
    return out


def build_generator(spec: GeneratorSpec, scorer: SemanticScorer = DEFAULT_SCORER, quality: QualityComputer | None = None):
    """Instantiate the generator described by ``spec``.

    Oracle generators measure candidate quality with ``scorer`` (through
    a shared :class:`QualityComputer` when one is supplied).
    """
    if spec.kind == IDENTITY:
        return IdentityGenerator()
    if spec.kind == RETRIEVAL_ORACLE:
        return RetrievalOracleGenerator(quality or QualityComputer(scorer))
    if spec.kind == NOISY_ORACLE:
        return NoisyOracleGenerator(spec.noise_std, spec.seed, quality or QualityComputer(scorer))
    return ExternalCommandGenerator(spec.command)


def generate(
    spec: GeneratorSpec,
    s: str,
    c: ControlVector,
    context: Cluster | None = None,
    scorer: SemanticScorer = DEFAULT_SCORER,
) -> str:
    """One-shot functional form of the generator interface."""
    return build_generator(spec, scorer).generate(s, c, context)
