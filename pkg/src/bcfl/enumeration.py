"""Exact derivation counts and integer-to-tree decoding over packed forests."""

from __future__ import annotations

import json
import re
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import List, Optional, Sequence, Tuple

from .forest import ForestNode, nodes


@dataclass(frozen=True)
class DerivationTree:
    """One concrete derivation.

    ``children`` is empty for a terminal leaf, holds a single terminal leaf
    for a preterminal attachment ``w -> t``, and two subtrees for ``w -> x z``.
    """

    root: str
    children: Tuple["DerivationTree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def sexpr(self) -> str:
        return to_sexpr(self)

    def __str__(self):
        return to_sexpr(self)


_PLAIN = re.compile(r'^[^\s()"\\]+$')


def atom(sym: str) -> str:
    return sym if _PLAIN.match(sym) else json.dumps(sym, ensure_ascii=False)


def to_sexpr(tree: DerivationTree) -> str:
    """Canonical serialization: ``(root child ...)``; leaves are bare atoms.

    Symbols containing whitespace, parentheses, quotes or backslashes are
    written as JSON strings.
    """
    parts: List[str] = []
    stack: List = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if item.is_leaf:
            parts.append(atom(item.root))
            continue
        parts.append("(" + atom(item.root))
        stack.append(")")
        for child in reversed(item.children):
            stack.append(child)
            stack.append(" ")
    return "".join(parts)


def count(t: ForestNode) -> int:
    """Number of derivation trees packed in ``t`` (1 for leaves).

    Results are memoized on the nodes, so shared subforests are counted once.
    """
    if t._count is not None:
        return t._count
    for node in nodes(t):
        if node._count is not None:
            continue
        if node.is_leaf:
            node._count = 1
        else:
            node._count = sum(l._count * r._count for l, r in node.children)
    return t._count


def prefix_sums(t: ForestNode) -> List[int]:
    """Running totals of ``count(l) * count(r)`` over the child pairs."""
    if t._prefix is None:
        if t.is_leaf:
            raise ValueError("a leaf has no child pairs")
        count(t)
        t._prefix = list(accumulate(l._count * r._count for l, r in t.children))
    return t._prefix


def select_pair(F: Sequence[int], i: int) -> Tuple[int, int]:
    """Locate index ``i`` in the half-open blocks ``[F[p-1], F[p])``.

    Returns ``(p, i - F[p-1])`` with ``F[-1]`` taken as 0.
    """
    if not F or i < 0 or i >= F[-1]:
        total = F[-1] if F else 0
        raise IndexError(f"index {i} out of range for {total} trees")
    p = bisect_right(F, i)
    return p, i - (F[p - 1] if p else 0)


def phi(t: ForestNode, i: int) -> DerivationTree:
    """Decode ``i`` in ``range(count(t))`` into the ``i``-th derivation of ``t``."""
    total = count(t)
    if not 0 <= i < total:
        raise IndexError(f"index {i} out of range for {total} trees")
    return _decode(t, i)


def _decode(t: ForestNode, i: int) -> DerivationTree:
    if t.is_leaf:
        return DerivationTree(t.root)
    p, q = select_pair(prefix_sums(t), i)
    left, right = t.children[p]
    if right.is_epsilon:
        return DerivationTree(t.root, (DerivationTree(left.root),))
    q1, q2 = divmod(q, right._count)
    return DerivationTree(t.root, (_decode(left, q1), _decode(right, q2)))


def yield_of(d: DerivationTree) -> List[str]:
    out: List[str] = []
    stack = [d]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            out.append(node.root)
        else:
            stack.extend(reversed(node.children))
    return out


def all_trees(t: Optional[ForestNode]) -> List[DerivationTree]:
    if t is None:
        return []
    return [phi(t, i) for i in range(count(t))]
