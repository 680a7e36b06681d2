"""Membership of concrete and porous strings via the set-valued CYK fixpoint."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .grammar import HOLE, CNFGrammar, check_tokens, terminal_producers

Cell = Tuple[int, int]
SetMatrix = Dict[Cell, FrozenSet[str]]


@dataclass(frozen=True)
class PorousString:
    """A token sequence where ``_`` marks a hole."""

    tokens: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("porous string must contain at least one token")

    @classmethod
    def parse(cls, text: str) -> "PorousString":
        return cls(tuple(text.split()))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def __str__(self):
        return " ".join(self.tokens)

    @property
    def holes(self) -> Tuple[int, ...]:
        return tuple(i for i, tok in enumerate(self.tokens) if tok == HOLE)

    def admits(self, concrete: Sequence[str]) -> bool:
        """True iff ``concrete`` agrees with every non-hole position."""
        return len(concrete) == len(self.tokens) and all(
            tok == HOLE or tok == c for tok, c in zip(self.tokens, concrete)
        )


def as_porous(s: Union[str, Sequence[str], PorousString]) -> PorousString:
    if isinstance(s, PorousString):
        return s
    if isinstance(s, str):
        return PorousString.parse(s)
    return PorousString(tuple(s))


def set_product(X: Iterable[str], Z: Iterable[str], g: CNFGrammar) -> FrozenSet[str]:
    Z = frozenset(Z)
    return frozenset(w for x in X for z in Z for w in g.parents(x, z))


def leaf_set(token: str, g: CNFGrammar) -> FrozenSet[str]:
    if token == HOLE:
        return frozenset().union(*(terminal_producers(g, t) for t in g.terminals))
    return terminal_producers(g, token)


@lru_cache(maxsize=64)
def _rule_arrays(g: CNFGrammar):
    names = g.nonterminals
    index = {name: i for i, name in enumerate(names)}
    parents = np.array([index[w] for w, _, _ in g.binary_rules], dtype=np.int64)
    lefts = np.array([index[x] for _, x, _ in g.binary_rules], dtype=np.int64)
    rights = np.array([index[z] for _, _, z in g.binary_rules], dtype=np.int64)
    return names, index, lefts, rights, parents


def chart(g: CNFGrammar, s) -> np.ndarray:
    """Boolean fixpoint chart, filled by increasing span length."""
    s = as_porous(s)
    check_tokens(g, s.tokens)
    names, index, lefts, rights, parents = _rule_arrays(g)
    out = _kernels.empty_chart(len(s), len(names))
    for r, tok in enumerate(s):
        for w in leaf_set(tok, g):
            out[r, r + 1, index[w]] = True
    return _kernels.fill_chart(out, lefts, rights, parents)


def set_matrix(g: CNFGrammar, s) -> SetMatrix:
    """The fixpoint as a sparse map ``(row, col) -> nonterminal set``.

    Only nonempty cells with ``col > row`` are present.
    """
    names = _rule_arrays(g)[0]
    grid = chart(g, s)
    out: SetMatrix = {}
    for r, c in zip(*np.nonzero(grid.any(axis=2))):
        out[(int(r), int(c))] = frozenset(names[w] for w in np.flatnonzero(grid[r, c]))
    return out


def recognize(g: CNFGrammar, s) -> bool:
    s = as_porous(s)
    grid = chart(g, s)
    _, index, *_ = _rule_arrays(g)
    w = index.get(g.start)
    return w is not None and bool(grid[0, len(s), w])


def squaring_fixpoint(g: CNFGrammar, s) -> SetMatrix:
    """Reference path: iterate ``M <- M + M @ M`` over the set semiring.

    Quadratically slower than :func:`set_matrix`; kept to cross-check the
    span-length schedule.
    """
    s = as_porous(s)
    check_tokens(g, s.tokens)
    n = len(s)
    M: SetMatrix = {}
    for r, tok in enumerate(s):
        cell = leaf_set(tok, g)
        if cell:
            M[(r, r + 1)] = cell
    while True:
        nxt = dict(M)
        for r in range(n + 1):
            for c in range(r + 2, n + 1):
                acc = set(nxt.get((r, c), ()))
                for k in range(r + 1, c):
                    left, right = M.get((r, k)), M.get((k, c))
                    if left and right:
                        acc |= set_product(left, right, g)
                if acc:
                    nxt[(r, c)] = frozenset(acc)
        if nxt == M:
            return M
        M = nxt
