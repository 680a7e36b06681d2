"""Command-line interface.

    bcfl recognize GRAMMAR "( _ )"
    bcfl count GRAMMAR "_ _ _ _"
    bcfl sample GRAMMAR "_ _ _ _" --k 2 --mode wor --format yield

Results go to stdout, one per line; a JSON metadata record goes to stderr.
Exit status is 0 on success, 1 when no tree exists but one was requested,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import islice

from . import __version__, _kernels, oracle
from .enumeration import count, phi, yield_of
from .forest import build_forest, root_forest
from .grammar import GrammarError, UnknownTokenError, parse_grammar, to_cnf
from .recognizer import PorousString, recognize
from .sampling import (COUNT, EXPLICIT, UNIFORM, WITH_REPLACEMENT, WITHOUT_REPLACEMENT,
                       SamplerConfig, SamplingError, TooManySamples, full_cycle_stream,
                       sample_with_replacement)

SEED_ENV = "BCFL_SEED"

MODE_ALIASES = {"wr": WITH_REPLACEMENT, "with": WITH_REPLACEMENT, WITH_REPLACEMENT: WITH_REPLACEMENT,
                "wor": WITHOUT_REPLACEMENT, "without": WITHOUT_REPLACEMENT,
                WITHOUT_REPLACEMENT: WITHOUT_REPLACEMENT}
WEIGHTING_ALIASES = {"count": COUNT, COUNT: COUNT, "uniform": UNIFORM, UNIFORM: UNIFORM,
                     EXPLICIT: EXPLICIT}


class InputError(Exception):
    pass


def _load(path, text):
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read grammar: {exc}") from exc
    try:
        g = to_cnf(parse_grammar(source))
    except GrammarError as exc:
        raise InputError(f"grammar error: {exc}") from exc
    try:
        s = PorousString.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return source, g, s


def _forest_root(g, s):
    try:
        return root_forest(build_forest(g, s), g)
    except UnknownTokenError as exc:
        raise InputError(str(exc)) from exc


def _render(tree, fmt):
    return " ".join(yield_of(tree)) if fmt == "yield" else tree.sexpr()


def _metadata(source, s, total, **extra):
    meta = {
        "grammar_sha256": hashlib.sha256(source.encode("utf-8")).hexdigest(),
        "porous_string": str(s),
        "count": str(total),
        "version": __version__,
    }
    meta.update(extra)
    print(json.dumps(meta, sort_keys=True), file=sys.stderr)


def _parse_k(text):
    if text.lower() == "all":
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'all', got {text!r}")
    if k < 0:
        raise argparse.ArgumentTypeError("k must be nonnegative")
    return k


def _seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}")
    return secrets.randbits(64)


def _load_weights(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read weights: {exc}") from exc
    weights = {}
    for rule, w in raw.items():
        if "->" not in rule:
            raise InputError(f"bad rule key {rule!r}; expected 'w -> x z' or 'w -> t'")
        lhs, rhs = rule.split("->", 1)
        weights[(lhs.strip(), *rhs.split())] = w
    return weights


# Worker state for --jobs: each process rebuilds the forest once and then only
# receives integer indices.
_WORKER_ROOT = None


def _init_worker(source, text):
    global _WORKER_ROOT
    g = to_cnf(parse_grammar(source))
    _WORKER_ROOT = root_forest(build_forest(g, PorousString.parse(text)), g)
    count(_WORKER_ROOT)


def _decode_index(args):
    i, fmt = args
    return _render(phi(_WORKER_ROOT, i), fmt)


def cmd_recognize(args):
    _, g, s = _load(args.grammar, args.string)
    try:
        ok = recognize(g, s)
    except UnknownTokenError as exc:
        raise InputError(str(exc)) from exc
    print("true" if ok else "false")
    return 0


def cmd_count(args):
    source, g, s = _load(args.grammar, args.string)
    root = _forest_root(g, s)
    total = count(root) if root is not None else 0
    print(total)
    _metadata(source, s, total)
    return 0


def cmd_sample(args):
    source, g, s = _load(args.grammar, args.string)
    mode = MODE_ALIASES[args.mode]
    weighting = WEIGHTING_ALIASES[args.weighting]
    weights = _load_weights(args.weights) if args.weights else None
    if weighting == EXPLICIT and weights is None:
        raise InputError("--weighting explicit requires --weights")
    seed = _seed(args.seed)
    if mode == WITH_REPLACEMENT and args.k is None:
        raise InputError("--k all is only meaningful without replacement")
    try:
        cfg = SamplerConfig(mode=mode, weighting=weighting, weights=weights, seed=seed, k=args.k)
    except SamplingError as exc:
        raise InputError(str(exc)) from exc

    root = _forest_root(g, s)
    total = count(root) if root is not None else 0
    meta = dict(seed=seed, mode=mode, weighting=weighting, backend=_kernels.backend())
    if root is None:
        _metadata(source, s, 0, **meta)
        print("error: no completion of the porous string is in the language", file=sys.stderr)
        return 1

    out = sys.stdout
    if mode == WITHOUT_REPLACEMENT:
        k = total if cfg.k is None else cfg.k
        if k > total:
            _metadata(source, s, total, **meta)
            raise InputError(str(TooManySamples(k, total)))
        stream = full_cycle_stream(total, seed)
        _metadata(source, s, total, stream=stream.mode, **meta)
        indices = islice(stream, k)
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs, initializer=_init_worker,
                                     initargs=(source, str(s))) as pool:
                for line in pool.map(_decode_index, ((i, args.format) for i in indices),
                                     chunksize=64):
                    out.write(line + "\n")
        else:
            for i in indices:
                out.write(_render(phi(root, i), args.format) + "\n")
    else:
        _metadata(source, s, total, **meta)
        try:
            for tree in sample_with_replacement(root, cfg):
                out.write(_render(tree, args.format) + "\n")
        except SamplingError as exc:
            raise InputError(str(exc)) from exc
    return 0


def cmd_enumerate(args):
    source, g, s = _load(args.grammar, args.string)
    if args.oracle:
        try:
            trees = oracle.derivation_set(g, s.tokens)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        lines = sorted(trees.trees)
        if args.format == "yield":
            lines = [" ".join(y.split()) for y, n in sorted(trees.per_yield.items()) for _ in range(n)]
        total = len(trees.trees)
    else:
        root = _forest_root(g, s)
        total = count(root) if root is not None else 0
        lines = (_render(phi(root, i), args.format) for i in range(total))
    for line in lines:
        print(line)
    _metadata(source, s, total, oracle=args.oracle)
    return 0 if total else 1


def cmd_cnf(args):
    try:
        with open(args.grammar, encoding="utf-8") as fh:
            g = to_cnf(parse_grammar(fh.read()))
    except OSError as exc:
        raise InputError(f"cannot read grammar: {exc}") from exc
    except GrammarError as exc:
        raise InputError(f"grammar error: {exc}") from exc
    sys.stdout.write(g.to_text())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="bcfl", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("grammar", help="grammar file")
        p.add_argument("string", help="whitespace-separated tokens, '_' for a hole")

    p = sub.add_parser("recognize", help="does any completion belong to the language")
    common(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("count", help="number of derivation trees over all completions")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="sample derivation trees")
    common(p)
    p.add_argument("--k", type=_parse_k, default=1, help="number of trees, or 'all' (default 1)")
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV}, else fresh entropy)")
    p.add_argument("--mode", choices=sorted(MODE_ALIASES), default="wr")
    p.add_argument("--weighting", choices=sorted(WEIGHTING_ALIASES), default="count")
    p.add_argument("--weights", help="JSON file mapping 'w -> x z' rules to weights")
    p.add_argument("--format", choices=("sexpr", "yield"), default="sexpr")
    p.add_argument("--jobs", type=int, default=1, help="decode worker processes (wor mode)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="list every derivation tree")
    common(p)
    p.add_argument("--oracle", action="store_true", help="use the brute-force reference")
    p.add_argument("--format", choices=("sexpr", "yield"), default="sexpr")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("cnf", help="print the normalized grammar")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_cnf)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
