"""Completion, counting and uniform sampling of derivation trees for
context-free grammars over strings with holes."""

__version__ = "0.1.0"

from .enumeration import DerivationTree, count, phi, prefix_sums, select_pair, yield_of
from .forest import EPSILON, ForestNode, build_forest, leaf_forest, oplus, otimes, root_forest
from .grammar import (HOLE, CNFGrammar, Grammar, GrammarError, UnknownTokenError,
                      parse_grammar, terminal_producers, to_cnf)
from .recognizer import PorousString, recognize, set_product
from .sampling import (FullCycleIndexStream, SamplerConfig, full_cycle_stream, gamma_sample,
                       pair_weights, sample_without_replacement)
