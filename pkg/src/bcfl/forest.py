"""Packed parse forests for porous strings.

A :class:`ForestNode` is a root symbol plus an ordered list of alternative
child pairs; a ``ForestMap`` is a ``dict`` from root symbol to the node with
that root. Running the CYK schedule over forest maps instead of nonterminal
sets yields every parse of every completion, with subtrees of shorter spans
shared rather than copied.

Terminal attachments are stored as the pair ``(leaf(t), EPSILON)`` so that
counting and unranking need no special case for preterminals.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Tuple

from .grammar import HOLE, CNFGrammar, check_tokens, terminal_producers
from .recognizer import as_porous


class ForestNode:
    __slots__ = ("root", "children", "_count", "_prefix", "__weakref__")

    def __init__(self, root: str, children=()):
        self.root = root
        self.children: Tuple[Tuple["ForestNode", "ForestNode"], ...] = tuple(children)
        self._count = None
        self._prefix = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_epsilon(self) -> bool:
        return self is EPSILON

    def __repr__(self):
        if self.is_leaf:
            return f"leaf({self.root!r})"
        return f"ForestNode({self.root!r}, {len(self.children)} pairs)"


EPSILON = ForestNode("ε")

ForestMap = Dict[str, ForestNode]

_LEAVES: Dict[str, ForestNode] = {}


def leaf(t: str) -> ForestNode:
    node = _LEAVES.get(t)
    if node is None:
        node = _LEAVES.setdefault(t, ForestNode(t))
    return node


def leaf_forest(s: str, g: CNFGrammar) -> ForestMap:
    check_tokens(g, (s,))
    pairs: Dict[str, List] = {}
    for w, t in g.terminal_rules:
        if s == HOLE or s == t:
            pairs.setdefault(w, []).append((leaf(t), EPSILON))
    return {w: ForestNode(w, ps) for w, ps in pairs.items()}


def oplus(X: ForestMap, Z: ForestMap) -> ForestMap:
    out: ForestMap = {}
    for k in list(X) + [k for k in Z if k not in X]:
        x, z = X.get(k), Z.get(k)
        if x is None:
            out[k] = z
        elif z is None:
            out[k] = x
        else:
            out[k] = ForestNode(k, x.children + z.children)
    return out


def otimes(X: ForestMap, Z: ForestMap, g: CNFGrammar) -> ForestMap:
    out: ForestMap = {}
    if not X or not Z:
        return out
    for w, x, z in g.binary_rules:
        if x in X and z in Z:
            out = oplus(out, {w: ForestNode(w, [(X[x], Z[z])])})
    return out


def _by_left(g: CNFGrammar) -> Dict[str, List[Tuple[int, str, str]]]:
    index: Dict[str, List[Tuple[int, str, str]]] = {}
    for idx, (w, x, z) in enumerate(g.binary_rules):
        index.setdefault(x, []).append((idx, w, z))
    return index


def forest_chart(g: CNFGrammar, s) -> Dict[Tuple[int, int], ForestMap]:
    """Every nonempty cell of the forest-valued fixpoint matrix.

    Child pairs of a node are ordered by binary-rule index, then by split
    point.
    """
    s = as_porous(s)
    check_tokens(g, s.tokens)
    n = len(s)
    order = {name: i for i, name in enumerate(g.nonterminals)}
    by_left = _by_left(g)
    cells: Dict[Tuple[int, int], ForestMap] = {}
    for r, tok in enumerate(s):
        cell = leaf_forest(tok, g)
        if cell:
            cells[(r, r + 1)] = cell
    for span in range(2, n + 1):
        for r in range(0, n - span + 1):
            c = r + span
            found: Dict[str, List] = {}
            for k in range(r + 1, c):
                X, Z = cells.get((r, k)), cells.get((k, c))
                if not X or not Z:
                    continue
                for x, xnode in X.items():
                    for idx, w, z in by_left.get(x, ()):
                        znode = Z.get(z)
                        if znode is not None:
                            found.setdefault(w, []).append((idx, k, xnode, znode))
            if found:
                cells[(r, c)] = {
                    w: ForestNode(w, [(xn, zn) for _, _, xn, zn in sorted(found[w], key=lambda e: e[:2])])
                    for w in sorted(found, key=order.__getitem__)
                }
    return cells


def build_forest(g: CNFGrammar, s) -> ForestMap:
    s = as_porous(s)
    return forest_chart(g, s).get((0, len(s)), {})


def root_forest(f: ForestMap, g: CNFGrammar) -> Optional[ForestNode]:
    return f.get(g.start)


def nodes(root: ForestNode) -> Iterator[ForestNode]:
    """Every node reachable from ``root``, each once, children before parents."""
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded or node.is_leaf:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for left, right in reversed(node.children):
            stack.append((right, False))
            stack.append((left, False))


def licensed(node: ForestNode, g: CNFGrammar) -> bool:
    """Check that every child pair of ``node`` is backed by a grammar rule."""
    binary = set(g.binary_rules)
    terminal = set(g.terminal_rules)
    for left, right in node.children:
        if right.is_epsilon:
            if not left.is_leaf or (node.root, left.root) not in terminal:
                return False
        elif (node.root, left.root, right.root) not in binary:
            return False
    return True
