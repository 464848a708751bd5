"""Independent oracles and enumerators used by the test suite.

Everything here is deliberately written from first principles (and kept
separate from the library), so an implementation bug cannot hide in a
shared code path: the tree-edit oracle enumerates Tai mappings, the
Levenshtein oracle fills the full textbook matrix, the bag-matching
oracle recurses over all partial matchings.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from qcpg_kit import ParseTree

# --- exhaustive enumeration of ordered labeled trees -------------------------


def tree_shapes(n: int) -> list[tuple]:
    """All ordered tree shapes with exactly n nodes, as nested tuples."""
    return list(_shapes_cached(n))


@lru_cache(maxsize=None)
def _shapes_cached(n: int) -> tuple:
    if n == 1:
        return ((),)
    out = []
    for sizes in _compositions(n - 1):
        child_options = [_shapes_cached(k) for k in sizes]
        for combo in product(*child_options):
            out.append(tuple(combo))
    return tuple(out)


def _compositions(total: int) -> list[tuple[int, ...]]:
    if total == 0:
        return [()]
    out = []
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            out.append((first,) + rest)
    return out


def shape_size(shape: tuple) -> int:
    return 1 + sum(shape_size(c) for c in shape)


def tree_from_shape(shape: tuple, labels: list[str]) -> ParseTree:
    """Assign labels to a shape in preorder."""
    it = iter(labels)

    def build(s):
        label = next(it)
        return ParseTree(label, tuple(build(c) for c in s))

    return build(shape)


def labeled_trees(shape: tuple, alphabet: str) -> list[ParseTree]:
    n = shape_size(shape)
    return [tree_from_shape(shape, list(combo)) for combo in product(alphabet, repeat=n)]


def all_trees(max_nodes: int, alphabet: str) -> list[ParseTree]:
    """Every ordered labeled tree with 1..max_nodes nodes over the alphabet."""
    out = []
    for n in range(1, max_nodes + 1):
        for shape in tree_shapes(n):
            out.extend(labeled_trees(shape, alphabet))
    return out


# --- brute-force tree edit distance (exhaustive Tai mappings) -----------------


def _flatten_relations(tree: ParseTree):
    """Preorder labels plus postorder index per preorder node id."""
    labels: list[str] = []
    post: list[int] = []
    counter = [0]

    def walk(node):
        nid = len(labels)
        labels.append(node.label)
        post.append(-1)
        for child in node.children:
            walk(child)
        post[nid] = counter[0]
        counter[0] += 1

    walk(tree)
    return labels, post


def ted_bruteforce(a: ParseTree, b: ParseTree) -> int:
    """Unit-cost tree edit distance as the minimum over all valid mappings.

    A mapping is a set of one-to-one node pairs preserving the ancestor
    and left-to-right relations; its cost is one per relabel plus one
    per unmapped node on either side. All mappings are enumerated
    (depth-first over the first tree's preorder), with an admissible
    bound used only to cut provably worse branches.
    """
    la, post_a = _flatten_relations(a)
    lb, post_b = _flatten_relations(b)
    na, nb = len(la), len(lb)
    best = [na + nb]  # the empty mapping
    used = [False] * nb
    pairs: list[tuple[int, int]] = []

    def dfs(i: int, partial: int, mapped: int):
        unused_b = nb - mapped
        if partial + max(0, unused_b - (na - i)) >= best[0]:
            return
        if i == na:
            best[0] = partial + unused_b
            return
        for j in range(nb):
            if used[j]:
                continue
            ok = True
            for u, v in pairs:
                # u precedes i in preorder; the b side must match both orders
                if v > j:
                    ok = False
                    break
                if (post_a[u] > post_a[i]) != (post_b[v] > post_b[j]):
                    ok = False
                    break
            if not ok:
                continue
            used[j] = True
            pairs.append((i, j))
            dfs(i + 1, partial + (la[i] != lb[j]), mapped + 1)
            pairs.pop()
            used[j] = False
        dfs(i + 1, partial + 1, mapped)  # delete node i

    dfs(0, 0, 0)
    return best[0]


def canonical_pair_key(a: ParseTree, b: ParseTree) -> str:
    """Key identifying (a, b) up to a joint relabeling of both trees."""
    ids: dict[str, int] = {}

    def serialize(t: ParseTree) -> str:
        i = ids.setdefault(t.label, len(ids))
        return f"({i}{''.join(serialize(c) for c in t.children)})"

    return serialize(a) + "|" + serialize(b)


# --- string and bag oracles ---------------------------------------------------


def levenshtein_oracle(s: str, t: str) -> int:
    """Full-matrix textbook dynamic program."""
    m, n = len(s), len(t)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (s[i - 1] != t[j - 1]),
            )
    return d[m][n]


def matching_bruteforce(a_words: tuple[str, ...], b_words: tuple[str, ...]) -> int:
    """Minimum over all partial matchings of edit cost + unmatched lengths."""

    @lru_cache(maxsize=None)
    def rec(i: int, remaining: frozenset) -> int:
        if i == len(a_words):
            return sum(len(b_words[j]) for j in remaining)
        best = len(a_words[i]) + rec(i + 1, remaining)  # leave a_words[i] unmatched
        for j in remaining:
            cost = levenshtein_oracle(a_words[i], b_words[j])
            best = min(best, cost + rec(i + 1, remaining - {j}))
        return best

    result = rec(0, frozenset(range(len(b_words))))
    rec.cache_clear()
    return result


# --- random structures ----------------------------------------------------------


def random_ordered_tree(rng, n_nodes: int, alphabet: str) -> ParseTree:
    """Uniformish random ordered labeled tree built by child attachment."""
    children: list[list[int]] = [[] for _ in range(n_nodes)]
    for node in range(1, n_nodes):
        parent = int(rng.integers(0, node))
        children[parent].append(node)
    labels = [str(rng.choice(list(alphabet))) for _ in range(n_nodes)]

    def build(i: int) -> ParseTree:
        return ParseTree(labels[i], tuple(build(c) for c in children[i]))

    return build(0)


_PHRASE_LABELS = ["S", "NP", "VP", "PP", "ADJP", "SBAR"]
_POS_LABELS = ["DT", "NN", "VB", "JJ", "IN", "RB"]
_WORDS = ["the", "cat", "sat", "big", "on", "mat", "a", "dog", "ran", "red"]


def random_parse_tree(rng, max_depth: int = 4) -> ParseTree:
    """Treebank-shaped random tree: branching phrases over unary POS+token."""

    def phrase(depth: int) -> ParseTree:
        label = str(rng.choice(_PHRASE_LABELS))
        n_children = int(rng.integers(2, 4))
        kids = []
        for _ in range(n_children):
            if depth + 1 >= max_depth or rng.random() < 0.5:
                pos = str(rng.choice(_POS_LABELS))
                word = str(rng.choice(_WORDS))
                kids.append(ParseTree(pos, (ParseTree(word),)))
            else:
                kids.append(phrase(depth + 1))
        return ParseTree(label, tuple(kids))

    return phrase(1)
