"""Brute-force reference used to check the forest machinery.

Nothing here touches the recognizer chart or the forest algebra: completions
are enumerated by substitution and derivations by top-down backtracking over
every rule and split point.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

from .grammar import HOLE, CNFGrammar, Grammar

MAX_COMPLETIONS = 10 ** 6
MAX_LENGTH = 8


class OracleTooLarge(ValueError):
    pass


@dataclass
class DerivationSet:
    trees: Set[str] = field(default_factory=set)
    per_yield: Counter = field(default_factory=Counter)

    def __len__(self):
        return len(self.trees)

    def update(self, other: "DerivationSet"):
        self.trees |= other.trees
        self.per_yield.update(other.per_yield)


_PLAIN = re.compile(r'^[^\s()"\\]+$')


def _atom(sym: str) -> str:
    return sym if _PLAIN.match(sym) else json.dumps(sym, ensure_ascii=False)


def _render(tree) -> str:
    # tree is a terminal string or (root, children...)
    if isinstance(tree, str):
        return _atom(tree)
    return "(" + " ".join([_atom(tree[0])] + [_render(ch) for ch in tree[1:]]) + ")"


def _tree_table(g: CNFGrammar, tokens: Tuple[str, ...]):
    @lru_cache(maxsize=None)
    def trees(sym: str, i: int, j: int) -> Tuple:
        out = []
        if j - i == 1:
            for w, t in g.terminal_rules:
                if w == sym and t == tokens[i]:
                    out.append((sym, t))
        for w, x, z in g.binary_rules:
            if w != sym:
                continue
            for k in range(i + 1, j):
                for left in trees(x, i, k):
                    for right in trees(z, k, j):
                        out.append((sym, left, right))
        return tuple(out)

    return trees


def enumerate_derivations(g: CNFGrammar, sentence: Sequence[str]) -> DerivationSet:
    tokens = tuple(sentence)
    if len(tokens) > MAX_LENGTH:
        raise OracleTooLarge(f"oracle limited to strings of length <= {MAX_LENGTH}")
    result = DerivationSet()
    if not tokens:
        return result
    found = _tree_table(g, tokens)(g.start, 0, len(tokens))
    result.trees = {_render(t) for t in found}
    if found:
        result.per_yield[" ".join(tokens)] = len(result.trees)
    return result


def _member(g: CNFGrammar, tokens: Tuple[str, ...]) -> bool:
    @lru_cache(maxsize=None)
    def derives(sym: str, i: int, j: int) -> bool:
        if j - i == 1 and (sym, tokens[i]) in terminal:
            return True
        return any(w == sym and derives(x, i, k) and derives(z, k, j)
                   for w, x, z in g.binary_rules for k in range(i + 1, j))

    terminal = set(g.terminal_rules)
    return derives(g.start, 0, len(tokens))


def enumerate_completions(g: CNFGrammar, s: Sequence[str]) -> Set[Tuple[str, ...]]:
    tokens = tuple(s)
    holes = [i for i, tok in enumerate(tokens) if tok == HOLE]
    for tok in tokens:
        if tok != HOLE and tok not in g.terminals:
            raise ValueError(f"unknown token {tok!r}")
    alphabet = sorted(g.terminals)
    if len(alphabet) ** len(holes) > MAX_COMPLETIONS:
        raise OracleTooLarge("oracle instance too large")
    out = set()
    for fill in product(alphabet, repeat=len(holes)):
        candidate = list(tokens)
        for pos, t in zip(holes, fill):
            candidate[pos] = t
        candidate = tuple(candidate)
        if _member(g, candidate):
            out.add(candidate)
    return out


def derivation_set(g: CNFGrammar, s: Sequence[str]) -> DerivationSet:
    """All derivations of all completions of ``s``."""
    out = DerivationSet()
    for sentence in enumerate_completions(g, s):
        out.update(enumerate_derivations(g, sentence))
    return out


def generates(g: Grammar, sentence: Sequence[str]) -> bool:
    """Membership under an arbitrary (non-normalized) grammar.

    Least fixpoint over facts "symbol derives tokens[i:j]", including empty
    spans, so epsilon and unit rules need no preprocessing.
    """
    tokens = tuple(sentence)
    n = len(tokens)
    facts: Set[Tuple[str, int, int]] = set()

    def derives(sym, i, j):
        if sym in g.terminals:
            return j == i + 1 and tokens[i] == sym
        return (sym, i, j) in facts

    def matches(rhs, i, j):
        # can rhs split tokens[i:j] into consecutive (possibly empty) pieces
        reach = {i}
        for sym in rhs:
            reach = {e for s in reach for e in range(s, j + 1) if derives(sym, s, e)}
            if not reach:
                return False
        return j in reach

    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            for i in range(n + 1):
                for j in range(i, n + 1):
                    if (lhs, i, j) not in facts and matches(rhs, i, j):
                        facts.add((lhs, i, j))
                        changed = True
    return (g.start, 0, n) in facts
