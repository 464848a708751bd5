"""Bracketed constituency trees and the syntactic distance defined on them.

Trees arrive as Penn-Treebank-style bracketed text, e.g.::

    (S (NP (DT the) (NN cat)) (VP (VBD sat)))

The syntactic distance between two parses is the tree edit distance
(Zhang-Shasha) between the trees after truncating them to their top
levels and removing surface tokens, normalized by the larger tree size
and scaled to [0, 100].
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyLabel, TrailingInput, UnbalancedParens

DEFAULT_PRUNE_LEVEL = 3


@dataclass(frozen=True)
class ParseTree:
    """A labeled ordered tree. Leaves are nodes with no children."""

    label: str
    children: tuple["ParseTree", ...] = ()

    def __post_init__(self):
        if not self.label:
            raise ValueError("node label must be non-empty")
        if re.search(r"[()\s]", self.label):
            raise ValueError(f"node label may not contain parentheses or whitespace: {self.label!r}")

    def node_count(self) -> int:
        return 1 + sum(child.node_count() for child in self.children)

    def depth(self) -> int:
        if not self.children:
            return 1
        return 1 + max(child.depth() for child in self.children)

    def render(self) -> str:
        """Serialize back to bracketed text; inverse of :func:`parse_bracketed`."""
        if not self.children:
            return f"({self.label})"
        return f"({self.label} {self._render_inner()})"

    def _render_inner(self) -> str:
        parts = []
        for child in self.children:
            if child.children:
                parts.append(f"({child.label} {child._render_inner()})")
            else:
                parts.append(child.label)
        return " ".join(parts)


@dataclass(frozen=True)
class EditCost:
    """Costs of the three edit operations; relabel(a, a) is always 0."""

    insert: float = 1
    delete: float = 1
    relabel: float = 1

    def __post_init__(self):
        if min(self.insert, self.delete, self.relabel) < 0:
            raise ValueError("edit costs must be non-negative")


_UNIT_COSTS = EditCost()


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def parse_bracketed(text: str) -> ParseTree:
    """Parse one bracketed tree; reports errors with UTF-8 byte offsets.

    Bare words inside a node, such as ``the`` in ``(DT the)``, become
    leaf children; ``(A)`` is a childless root.
    """
    i, n = 0, len(text)

    def skip_ws(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    def read_word(i):
        start = i
        while i < n and not text[i].isspace() and text[i] not in "()":
            i += 1
        return text[start:i], i

    def parse_node(i):
        # caller guarantees text[i] == "("
        i = skip_ws(i + 1)
        label, i = read_word(i)
        if not label:
            raise EmptyLabel("expected a node label after '('", _byte_offset(text, i))
        children = []
        while True:
            i = skip_ws(i)
            if i >= n:
                raise UnbalancedParens("unexpected end of input; missing ')'", _byte_offset(text, i))
            ch = text[i]
            if ch == ")":
                return ParseTree(label, tuple(children)), i + 1
            if ch == "(":
                child, i = parse_node(i)
                children.append(child)
            else:
                word, i = read_word(i)
                children.append(ParseTree(word))

    i = skip_ws(i)
    if i >= n or text[i] != "(":
        raise UnbalancedParens("expected '(' at start of tree", _byte_offset(text, i))
    tree, i = parse_node(i)
    i = skip_ws(i)
    if i < n:
        raise TrailingInput("unexpected text after complete tree", _byte_offset(text, i))
    return tree


def prune_to_level(tree: ParseTree, level: int = DEFAULT_PRUNE_LEVEL) -> ParseTree:
    """Keep only nodes at depth <= level, with the root at level 1."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if level == 1 or not tree.children:
        return ParseTree(tree.label)
    return ParseTree(tree.label, tuple(prune_to_level(c, level - 1) for c in tree.children))


# Labels made of uppercase letters (plus digits and common tag punctuation)
# are treated as structural (POS/phrase) labels; anything else on a leaf
# that is its parent's only child is a surface token.
_STRUCTURAL_LABEL = re.compile(r"^[A-Z0-9$#_.,:`'-]*[A-Z][A-Z0-9$#_.,:`'-]*$")


def _is_token_leaf(parent: ParseTree, child: ParseTree) -> bool:
    return (
        len(parent.children) == 1
        and not child.children
        and not _STRUCTURAL_LABEL.match(child.label)
    )


def strip_tokens(tree: ParseTree) -> ParseTree:
    """Remove surface-token leaves, keeping preterminal (POS) labels.

    A leaf counts as a token when it is the only child of its parent and
    its label does not look like a structural tag. Both conditions hold
    for tokens under unary preterminals (``(DT the)``) while leaf tags
    and leaf phrases survive, so the operation is idempotent on trees in
    treebank form.
    """
    if len(tree.children) == 1 and _is_token_leaf(tree, tree.children[0]):
        return ParseTree(tree.label)
    return ParseTree(tree.label, tuple(strip_tokens(c) for c in tree.children))


class _Flat:
    """Postorder arrays used by the Zhang-Shasha recurrence."""

    __slots__ = ("labels", "lml", "keyroots", "n")

    def __init__(self, root: ParseTree):
        labels: list[str] = []
        lml: list[int] = []

        def walk(node: ParseTree) -> int:
            if node.children:
                first = walk(node.children[0])
                for child in node.children[1:]:
                    walk(child)
                idx = len(labels)
                labels.append(node.label)
                lml.append(lml[first])
            else:
                idx = len(labels)
                labels.append(node.label)
                lml.append(idx)
            return idx

        walk(root)
        self.labels = labels
        self.lml = lml
        self.n = len(labels)
        last_for_lml: dict[int, int] = {}
        for i, l in enumerate(lml):
            last_for_lml[l] = i
        self.keyroots = sorted(last_for_lml.values())


def tree_edit_distance(a: ParseTree, b: ParseTree, costs: EditCost = _UNIT_COSTS):
    """Minimal edit cost transforming ``a`` into ``b`` (Zhang-Shasha).

    Edits are node insertion, deletion, and relabeling on ordered trees;
    ancestor and left-to-right relations are preserved. With the default
    integer unit costs the result is an exact integer.
    """
    A, B = _Flat(a), _Flat(b)
    la, lb = A.lml, B.lml
    aL, bL = A.labels, B.labels
    cd, ci, cr = costs.delete, costs.insert, costs.relabel
    zero = cd - cd  # 0 of the cost type, keeps int costs exact
    td = [[zero] * B.n for _ in range(A.n)]

    for i in A.keyroots:
        li = la[i]
        m = i - li + 2
        for j in B.keyroots:
            lj = lb[j]
            n = j - lj + 2
            fd = [[zero] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + cd
            row0 = fd[0]
            for y in range(1, n):
                row0[y] = row0[y - 1] + ci
            for x in range(1, m):
                ax = x + li - 1
                lax = la[ax]
                a_whole = lax == li
                a_label = aL[ax]
                fdx, fdx1 = fd[x], fd[x - 1]
                tdax = td[ax]
                for y in range(1, n):
                    by = y + lj - 1
                    if a_whole and lb[by] == lj:
                        rel = zero if a_label == bL[by] else cr
                        v = fdx1[y] + cd
                        w = fdx[y - 1] + ci
                        if w < v:
                            v = w
                        w = fdx1[y - 1] + rel
                        if w < v:
                            v = w
                        tdax[by] = v
                    else:
                        v = fdx1[y] + cd
                        w = fdx[y - 1] + ci
                        if w < v:
                            v = w
                        w = fd[lax - li][lb[by] - lj] + tdax[by]
                        if w < v:
                            v = w
                    fdx[y] = v
    return td[A.n - 1][B.n - 1]


def syntactic_distance(a: ParseTree, b: ParseTree, level: int = DEFAULT_PRUNE_LEVEL) -> float:
    """Normalized structural distance between two raw parses, in [0, 100].

    Both trees are pruned to the top ``level`` levels and token-stripped,
    then compared with unit-cost tree edit distance normalized by the
    larger pruned tree size.
    """
    pa = strip_tokens(prune_to_level(a, level))
    pb = strip_tokens(prune_to_level(b, level))
    ted = tree_edit_distance(pa, pb)
    denom = max(pa.node_count(), pb.node_count())
    return 100.0 * min(max(ted / denom, 0.0), 1.0)
