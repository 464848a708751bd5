"""Measuring paraphrase quality: the three dimensions, step by step.

Quality is a 3-vector on a 0-100 scale:
  sem -- semantic similarity (sigmoid-normalized raw scorer output)
  syn -- syntactic distance (tree edit distance on pruned, token-stripped parses)
  lex -- lexical distance (assignment cost between bags of words)
"""

from qcpg_kit import (
    ControlVector,
    Offset,
    apply_offset,
    builtin_trigram_raw,
    decode_control,
    lexical_distance,
    parse_bracketed,
    prepend_control,
    prune_to_level,
    quality_vector,
    quantize,
    semantic_similarity,
    strip_tokens,
    syntactic_distance,
    tree_edit_distance,
)

source = "The quick brown fox jumps over the lazy dog"
close = "The quick brown fox leaps over the lazy dog"
far = "A slow turtle crawls beneath an energetic cat"

tree_source = parse_bracketed(
    "(S (NP (DT The) (JJ quick) (JJ brown) (NN fox))"
    " (VP (VBZ jumps) (PP (IN over) (NP (DT the) (JJ lazy) (NN dog)))))"
)
tree_close = parse_bracketed(
    "(S (NP (DT The) (JJ quick) (JJ brown) (NN fox))"
    " (VP (VBZ leaps) (PP (IN over) (NP (DT the) (JJ lazy) (NN dog)))))"
)
tree_far = parse_bracketed(
    "(S (NP (DT A) (JJ slow) (NN turtle))"
    " (VP (VBZ crawls) (PP (IN beneath) (NP (DT an) (JJ energetic) (NN cat)))))"
)

print("== syntactic distance ==")
print("raw parse:        ", tree_source.render()[:72], "...")
pruned = prune_to_level(tree_source, 3)
print("pruned to level 3:", pruned.render())
print("tokens stripped:  ", strip_tokens(pruned).render())
print("unit-cost TED close pair:", tree_edit_distance(
    strip_tokens(prune_to_level(tree_source, 3)), strip_tokens(prune_to_level(tree_close, 3))
))
print("q_syn close: %5.2f   far: %5.2f" % (
    syntactic_distance(tree_source, tree_close),
    syntactic_distance(tree_source, tree_far),
))

print()
print("== lexical distance (word-order independent) ==")
print("q_lex close: %5.2f   far: %5.2f" % (
    lexical_distance(source, close), lexical_distance(source, far)))
shuffled = "dog lazy the over jumps fox brown quick The"
print("q_lex vs shuffled self: %5.2f  (order never matters)" % lexical_distance(source, shuffled))

print()
print("== semantic similarity ==")
for name, other in (("self", source), ("close", close), ("far", far)):
    raw = builtin_trigram_raw(source, other)
    print(f"raw {name:>5}: {raw:+.3f}  ->  q_sem {semantic_similarity(raw):6.2f}")

print()
print("== the full quality vector ==")
q = quality_vector(source, close, tree_source, tree_close)
print("q(source, close) =", tuple(round(v, 2) for v in q.as_tuple()))

print()
print("== quantization and control tokens ==")
control = ControlVector(quantize(q.sem), quantize(q.syn), quantize(q.lex))
print("quantized control:", control.as_tuple())
tagged = prepend_control(source, control)
print("generator input:  ", tagged[:72], "...")
print("decoded back:     ", decode_control(tagged)[0].as_tuple())
offset_control = apply_offset(q, Offset(0, 10, 25))
print("with offset (0, +10, +25):", offset_control.as_tuple())
