"""Grammar ingestion and Chomsky Normal Form conversion.

Grammar files hold one production per line::

    S -> S S | ( S ) | ( )

Symbols are whitespace-separated tokens. A symbol is a nonterminal iff it
appears on some left-hand side, and the first left-hand side is the start
symbol. ``#`` starts a comment. An empty alternative (``S -> a |``) or the
token ``ε`` denotes the empty string.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

HOLE = "_"
EPSILON_TOKENS = frozenset({"ε", "<eps>"})

_UNDEFINED_NT = re.compile(r"^[A-Z][A-Za-z0-9_']*$")

Production = Tuple[str, Tuple[str, ...]]


class GrammarError(ValueError):
    """Raised for malformed grammar sources or grammars that cannot be normalized."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Symbol:
    name: str
    terminal: bool

    def __post_init__(self):
        if not self.name or any(ch.isspace() for ch in self.name):
            raise GrammarError(f"invalid symbol name {self.name!r}")
        if self.name == HOLE:
            raise GrammarError(f"{HOLE!r} is reserved for holes")

    @property
    def kind(self) -> str:
        return "terminal" if self.terminal else "nonterminal"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Grammar:
    """A context-free grammar with productions kept in textual order."""

    terminals: FrozenSet[str]
    nonterminals: FrozenSet[str]
    productions: Tuple[Production, ...]
    start: str

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        if self.terminals & self.nonterminals:
            both = sorted(self.terminals & self.nonterminals)
            raise GrammarError(f"symbols are both terminal and nonterminal: {both}")
        for sym in self.terminals | self.nonterminals:
            Symbol(sym, sym in self.terminals)
        alphabet = self.terminals | self.nonterminals
        for lhs, rhs in self.productions:
            if lhs not in self.nonterminals:
                raise GrammarError(f"production lhs {lhs!r} is not a nonterminal")
            for sym in rhs:
                if sym not in alphabet:
                    raise GrammarError(f"unknown symbol {sym!r} in production for {lhs!r}")

    def symbol(self, name: str) -> Symbol:
        return Symbol(name, name in self.terminals)

    def rules_for(self, lhs: str) -> List[Tuple[str, ...]]:
        return [rhs for head, rhs in self.productions if head == lhs]


def parse_grammar(text: str, strict_case: bool = True) -> Grammar:
    """Parse grammar source text.

    With ``strict_case`` set, a right-hand-side token that looks like a
    nonterminal name (leading uppercase letter) but never appears on a
    left-hand side is reported as an undefined nonterminal instead of being
    silently read as a terminal.
    """
    productions: List[Production] = []
    lhs_lines: Dict[str, int] = {}
    rhs_lines: List[Tuple[int, str]] = []
    start = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise GrammarError("expected 'LHS -> alternatives'", lineno)
        head, body = line.split("->", 1)
        head_tokens = head.split()
        if len(head_tokens) != 1:
            raise GrammarError("left-hand side must be exactly one symbol", lineno)
        lhs = head_tokens[0]
        if lhs == HOLE:
            raise GrammarError(f"{HOLE!r} is reserved for holes", lineno)
        if lhs in EPSILON_TOKENS:
            raise GrammarError(f"{lhs!r} cannot be a left-hand side", lineno)
        if start is None:
            start = lhs
        lhs_lines.setdefault(lhs, lineno)
        for alt in body.split("|"):
            tokens = [tok for tok in alt.split() if tok not in EPSILON_TOKENS]
            for tok in tokens:
                if tok == HOLE:
                    raise GrammarError(f"{HOLE!r} is reserved for holes", lineno)
                rhs_lines.append((lineno, tok))
            productions.append((lhs, tuple(tokens)))

    if start is None:
        raise GrammarError("grammar has no productions")

    nonterminals = frozenset(lhs_lines)
    terminals = set()
    for lineno, tok in rhs_lines:
        if tok in nonterminals:
            continue
        if strict_case and _UNDEFINED_NT.match(tok):
            raise GrammarError(f"undefined nonterminal {tok!r}", lineno)
        terminals.add(tok)

    return Grammar(frozenset(terminals), nonterminals, tuple(productions), start)


@dataclass(frozen=True)
class CNFGrammar:
    """A grammar whose rules are all ``w -> x z`` or ``w -> t``.

    Rule indices are positions in ``binary_rules`` / ``terminal_rules``; the
    forest orders child pairs by them, so the order is part of the contract.
    """

    binary_rules: Tuple[Tuple[str, str, str], ...]
    terminal_rules: Tuple[Tuple[str, str], ...]
    start: str
    terminals: FrozenSet[str]
    _producers: Dict[str, FrozenSet[str]] = field(init=False, repr=False, compare=False)
    _by_body: Dict[Tuple[str, str], Tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.binary_rules)) != len(self.binary_rules):
            raise GrammarError("duplicate binary rule")
        if len(set(self.terminal_rules)) != len(self.terminal_rules):
            raise GrammarError("duplicate terminal rule")
        producers: Dict[str, set] = {}
        for w, t in self.terminal_rules:
            if t not in self.terminals:
                raise GrammarError(f"terminal rule uses unknown terminal {t!r}")
            producers.setdefault(t, set()).add(w)
        by_body: Dict[Tuple[str, str], List[str]] = {}
        for w, x, z in self.binary_rules:
            by_body.setdefault((x, z), []).append(w)
        object.__setattr__(self, "_producers", {t: frozenset(ws) for t, ws in producers.items()})
        object.__setattr__(self, "_by_body", {k: tuple(v) for k, v in by_body.items()})

    @property
    def nonterminals(self) -> Tuple[str, ...]:
        """Nonterminals in order of first appearance (start first)."""
        seen = {self.start: None}
        for w, x, z in self.binary_rules:
            seen.setdefault(w)
            seen.setdefault(x)
            seen.setdefault(z)
        for w, _ in self.terminal_rules:
            seen.setdefault(w)
        return tuple(seen)

    def parents(self, x: str, z: str) -> Tuple[str, ...]:
        return self._by_body.get((x, z), ())

    def rules(self) -> List[Production]:
        out: List[Production] = [(w, (x, z)) for w, x, z in self.binary_rules]
        out.extend((w, (t,)) for w, t in self.terminal_rules)
        return out

    def to_text(self) -> str:
        return "\n".join(f"{lhs} -> {' '.join(rhs)}" for lhs, rhs in self.rules()) + "\n"


def terminal_producers(g: CNFGrammar, t: str) -> FrozenSet[str]:
    """Nonterminals ``w`` with a rule ``w -> t``; empty for unknown tokens."""
    return g._producers.get(t, frozenset())


def is_cnf(g: Grammar) -> bool:
    for lhs, rhs in g.productions:
        if len(rhs) == 1 and rhs[0] in g.terminals:
            continue
        if len(rhs) == 2 and all(sym in g.nonterminals for sym in rhs):
            continue
        return False
    return True


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _dedup(rules: Iterable[Production]) -> List[Production]:
    return list(dict.fromkeys(rules))


def _term(g: Grammar, taken: set) -> List[Production]:
    # One shared pre-terminal per terminal, named after its first occurrence.
    pre: Dict[str, str] = {}
    out: List[Production] = []
    for idx, (lhs, rhs) in enumerate(g.productions):
        if len(rhs) < 2:
            out.append((lhs, rhs))
            continue
        new_rhs = []
        for pos, sym in enumerate(rhs):
            if sym in g.terminals:
                if sym not in pre:
                    pre[sym] = _fresh(f"T{idx}_{pos}", taken)
                sym = pre[sym]
            new_rhs.append(sym)
        out.append((lhs, tuple(new_rhs)))
    out.extend((nt, (t,)) for t, nt in pre.items())
    return out


def _bin(rules: List[Production], taken: set) -> List[Production]:
    # Left-factored: w -> x1 x2 x3 becomes w -> N x3, N -> x1 x2.
    out: List[Production] = []
    for idx, (lhs, rhs) in enumerate(rules):
        if len(rhs) <= 2:
            out.append((lhs, rhs))
            continue
        prev = rhs[0]
        chain: List[Production] = []
        for pos in range(1, len(rhs) - 1):
            name = _fresh(f"{lhs}_{idx}_{pos}", taken)
            chain.append((name, (prev, rhs[pos])))
            prev = name
        out.append((lhs, (prev, rhs[-1])))
        out.extend(chain)
    return out


def _nullable(rules: List[Production]) -> set:
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs not in nullable and all(sym in nullable for sym in rhs):
                nullable.add(lhs)
                changed = True
    return nullable


def _del(rules: List[Production], nullable: set) -> List[Production]:
    out: List[Production] = []
    for lhs, rhs in rules:
        variants = [rhs]
        if len(rhs) == 2:
            x, z = rhs
            if x in nullable:
                variants.append((z,))
            if z in nullable:
                variants.append((x,))
        out.extend((lhs, v) for v in variants if v)
    return _dedup(out)


def _unit(rules: List[Production], nonterminals: set) -> List[Production]:
    heads = list(dict.fromkeys(lhs for lhs, _ in rules))
    units: Dict[str, List[str]] = {}
    proper: Dict[str, List[Tuple[str, ...]]] = {}
    for lhs, rhs in rules:
        if len(rhs) == 1 and rhs[0] in nonterminals:
            units.setdefault(lhs, []).append(rhs[0])
        else:
            proper.setdefault(lhs, []).append(rhs)
    out: List[Production] = []
    for head in heads:
        closure = {head: None}
        queue = deque([head])
        while queue:
            cur = queue.popleft()
            for nxt in units.get(cur, ()):
                if nxt not in closure:
                    closure[nxt] = None
                    queue.append(nxt)
        for member in closure:
            out.extend((head, rhs) for rhs in proper.get(member, ()))
    return _dedup(out)


def _prune(rules: List[Production], start: str, terminals: FrozenSet[str]) -> List[Production]:
    generating: set = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs not in generating and all(s in terminals or s in generating for s in rhs):
                generating.add(lhs)
                changed = True
    if start not in generating:
        return []
    rules = [(lhs, rhs) for lhs, rhs in rules
             if lhs in generating and all(s in terminals or s in generating for s in rhs)]
    reachable = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for lhs, rhs in rules:
            if lhs == cur:
                for sym in rhs:
                    if sym not in terminals and sym not in reachable:
                        reachable.add(sym)
                        queue.append(sym)
    return [(lhs, rhs) for lhs, rhs in rules if lhs in reachable]


def to_cnf(g: Grammar) -> CNFGrammar:
    """Normalize ``g`` to CNF by TERM, BIN, DEL, UNIT and a final pruning pass.

    The result generates the language of ``g`` minus the empty string, and
    the rule order depends only on ``g``.
    """
    if is_cnf(g):
        rules = _dedup(g.productions)
        if not _prune(rules, g.start, g.terminals):
            raise GrammarError("grammar generates no strings from its start symbol")
    else:
        taken = set(g.terminals) | set(g.nonterminals) | {HOLE}
        rules = _bin(_term(g, taken), taken)
        nonterminals = {lhs for lhs, _ in rules} | set(g.nonterminals)
        nullable = _nullable(rules)
        rules = _unit(_del(rules, nullable), nonterminals)
        rules = _prune(rules, g.start, g.terminals)
        if not rules:
            if g.start in nullable:
                raise GrammarError("grammar generates only the empty string")
            raise GrammarError("grammar generates no strings from its start symbol")

    binary = tuple((lhs, rhs[0], rhs[1]) for lhs, rhs in rules if len(rhs) == 2)
    unary = tuple((lhs, rhs[0]) for lhs, rhs in rules if len(rhs) == 1)
    return CNFGrammar(binary, unary, g.start, g.terminals)


def load_grammar(path, strict_case: bool = True) -> CNFGrammar:
    with open(path, encoding="utf-8") as fh:
        return to_cnf(parse_grammar(fh.read(), strict_case=strict_case))


def tokenize(text: str) -> Tuple[str, ...]:
    return tuple(text.split())


def check_tokens(g: CNFGrammar, tokens: Sequence[str]) -> None:
    if not tokens:
        raise ValueError("porous string must contain at least one token")
    for pos, tok in enumerate(tokens):
        if tok != HOLE and tok not in g.terminals:
            raise UnknownTokenError(tok, pos)


class UnknownTokenError(ValueError):
    def __init__(self, token: str, position: int):
        self.token = token
        self.position = position
        super().__init__(f"unknown token {token!r} at position {position}")
