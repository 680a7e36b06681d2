"""Tree sampling with replacement (recursive Multinoulli descent) and without
replacement (a full-cycle index permutation decoded by :func:`phi`)."""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from .enumeration import DerivationTree, count, phi, prefix_sums
from .forest import ForestNode

WITH_REPLACEMENT = "with-replacement"
WITHOUT_REPLACEMENT = "without-replacement"
MODES = (WITH_REPLACEMENT, WITHOUT_REPLACEMENT)

COUNT = "count-proportional"
UNIFORM = "rule-uniform"
EXPLICIT = "explicit"
WEIGHTINGS = (COUNT, UNIFORM, EXPLICIT)

# Above this many trees the LCG permutation gives way to dedup sampling.
LCG_LIMIT = 2 ** 128

RuleKey = Tuple[str, ...]


class SamplingError(ValueError):
    pass


class TooManySamples(SamplingError):
    def __init__(self, k: int, total: int):
        self.k = k
        self.total = total
        super().__init__(f"requested {k} distinct trees but only {total} exist")


@dataclass
class SamplerConfig:
    mode: str = WITH_REPLACEMENT
    weighting: str = COUNT
    weights: Optional[Mapping[RuleKey, float]] = None
    seed: int = 0
    k: Optional[int] = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise SamplingError(f"unknown mode {self.mode!r}")
        if self.weighting not in WEIGHTINGS:
            raise SamplingError(f"unknown weighting {self.weighting!r}")
        if self.weighting == EXPLICIT:
            if self.weights is None:
                raise SamplingError("explicit weighting needs rule weights")
            self.weights = {tuple(key): float(w) for key, w in self.weights.items()}
            if any(w < 0 for w in self.weights.values()):
                raise SamplingError("rule weights must be nonnegative")
            totals: Dict[str, float] = {}
            for key, w in self.weights.items():
                totals[key[0]] = totals.get(key[0], 0.0) + w
            empty = sorted(nt for nt, total in totals.items() if total <= 0)
            if empty:
                raise SamplingError(f"weights for {empty} do not sum to a positive value")
        if self.k is not None and self.k < 0:
            raise SamplingError("sample count must be nonnegative")


def pair_rule(t: ForestNode, pair) -> RuleKey:
    left, right = pair
    if right.is_epsilon:
        return (t.root, left.root)
    return (t.root, left.root, right.root)


def pair_weights(t: ForestNode, cfg: SamplerConfig) -> List[Fraction]:
    """Normalized selection probabilities over the child pairs of ``t``.

    Under explicit weighting only the rules realized at this node compete,
    renormalized among themselves.
    """
    if t.is_leaf:
        raise SamplingError("a leaf has no child pairs")
    if cfg.weighting == COUNT:
        raw = [Fraction(l_count * r_count) for l_count, r_count in
               ((count(l), count(r)) for l, r in t.children)]
    elif cfg.weighting == UNIFORM:
        raw = [Fraction(1)] * len(t.children)
    else:
        raw = []
        for pair in t.children:
            key = pair_rule(t, pair)
            if key not in cfg.weights:
                raise SamplingError(f"incomplete probability vector: no weight for {' '.join(key)}")
            raw.append(Fraction(cfg.weights[key]))
    total = sum(raw)
    if total <= 0:
        raise SamplingError(f"all alternatives at {t.root!r} have zero weight")
    return [w / total for w in raw]


def _choose(t: ForestNode, cfg: SamplerConfig, rng: random.Random, cache: Dict) -> int:
    if cfg.weighting == COUNT:
        F = prefix_sums(t)
        return bisect_right(F, rng.randrange(F[-1]))
    if cfg.weighting == UNIFORM:
        return rng.randrange(len(t.children))
    cum = cache.get(id(t))
    if cum is None:
        cum = cache[id(t)] = [float(c) for c in _accumulate(pair_weights(t, cfg))]
    return min(bisect_right(cum, rng.random() * cum[-1]), len(cum) - 1)


def _accumulate(ws):
    total = Fraction(0)
    for w in ws:
        total += w
        yield total


def gamma_sample(t: ForestNode, cfg: SamplerConfig, rng: random.Random,
                 _cache: Optional[Dict] = None) -> DerivationTree:
    """Draw one derivation by choosing a child pair at every node."""
    cache = {} if _cache is None else _cache
    if t.is_leaf:
        return DerivationTree(t.root)
    left, right = t.children[_choose(t, cfg, rng, cache)]
    if right.is_epsilon:
        return DerivationTree(t.root, (DerivationTree(left.root),))
    return DerivationTree(t.root, (gamma_sample(left, cfg, rng, cache),
                                   gamma_sample(right, cfg, rng, cache)))


def sample_with_replacement(t: ForestNode, cfg: SamplerConfig) -> Iterator[DerivationTree]:
    rng = random.Random(cfg.seed)
    cache: Dict = {}
    drawn = 0
    while cfg.k is None or drawn < cfg.k:
        yield gamma_sample(t, cfg, rng, cache)
        drawn += 1


@dataclass
class FullCycleIndexStream:
    """Pseudorandom permutation of ``range(n)``.

    An LCG ``x -> (a x + c) mod m`` with ``m`` the least power of two
    ``>= n``, ``a = 1 (mod 4)`` and odd ``c`` has period exactly ``m``;
    outputs ``>= n`` are skipped. Past :data:`LCG_LIMIT` the stream draws
    uniform integers and drops repeats instead (``mode == "dedup"``).
    """

    n: int
    seed: int
    modulus: int = field(init=False)
    multiplier: int = field(init=False)
    increment: int = field(init=False)
    state: int = field(init=False)
    mode: str = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise SamplingError("stream needs at least one index")
        rng = random.Random(self.seed)
        self.mode = "lcg" if self.n < LCG_LIMIT else "dedup"
        self.modulus = 1 << (self.n - 1).bit_length()
        bits = max(self.modulus.bit_length() - 1, 1)
        self.multiplier = (4 * rng.getrandbits(bits) + 1) % self.modulus if self.modulus > 1 else 0
        self.increment = (2 * rng.getrandbits(bits) + 1) % self.modulus if self.modulus > 1 else 0
        self.state = rng.randrange(self.modulus)
        self._rng = rng
        self._emitted = 0
        self._seen: set = set()

    def __iter__(self):
        return self

    def __next__(self) -> int:
        if self._emitted >= self.n:
            raise StopIteration
        if self.mode == "dedup":
            while True:
                x = self._rng.randrange(self.n)
                if x not in self._seen:
                    self._seen.add(x)
                    break
        else:
            while True:
                x = self.state
                self.state = (self.multiplier * self.state + self.increment) % self.modulus
                if x < self.n:
                    break
        self._emitted += 1
        return x


def full_cycle_stream(n: int, seed: int) -> FullCycleIndexStream:
    return FullCycleIndexStream(n, seed)


def sample_without_replacement(t: ForestNode, cfg: SamplerConfig) -> Iterator[DerivationTree]:
    """Distinct derivations of ``t`` in the order of a seeded index permutation.

    ``cfg.k`` of ``None`` means every tree. Raises :class:`TooManySamples`
    before yielding anything if ``k`` exceeds the tree count.
    """
    total = count(t)
    k = total if cfg.k is None else cfg.k
    if k > total:
        raise TooManySamples(k, total)
    return _decode_stream(t, full_cycle_stream(total, cfg.seed), k)


def _decode_stream(t, stream, k):
    for _, i in zip(range(k), stream):
        yield phi(t, i)


def sample(t: ForestNode, cfg: SamplerConfig) -> Iterator[DerivationTree]:
    if cfg.mode == WITHOUT_REPLACEMENT:
        return sample_without_replacement(t, cfg)
    return sample_with_replacement(t, cfg)
