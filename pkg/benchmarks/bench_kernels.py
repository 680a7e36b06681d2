"""Benchmark the numba chart kernel against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 20 40 80] [--repeat 3]

Each size fills the recognizer chart for an all-hole string under the
ambiguous expression grammar and the Dyck grammar. The numba kernel is
warmed up once before timing so compilation is excluded.
"""

import argparse
import time

from bcfl import _kernels
from bcfl.grammar import parse_grammar, to_cnf
from bcfl.recognizer import _rule_arrays, leaf_set

GRAMMARS = {
    "dyck": "S -> S S | ( S ) | ( )",
    "expr": "E -> E + E | E * E | ( E ) | x | y",
}


def seeded_chart(g, n):
    names, index, lefts, rights, parents = _rule_arrays(g)
    chart = _kernels.empty_chart(n, len(names))
    for r in range(n):
        for w in leaf_set("_", g):
            chart[r, r + 1, index[w]] = True
    return chart, lefts, rights, parents


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80, 160])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path is available")

    print(f"{'grammar':8} {'n':>5} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8}")
    for name, source in GRAMMARS.items():
        g = to_cnf(parse_grammar(source))
        if _kernels.HAVE_NUMBA:
            _kernels.fill_chart_numba(*seeded_chart(g, 4))
        for n in args.sizes:
            t_np = best_of(lambda: _kernels.fill_chart_numpy(*seeded_chart(g, n)), args.repeat)
            if _kernels.HAVE_NUMBA:
                t_nb = best_of(lambda: _kernels.fill_chart_numba(*seeded_chart(g, n)), args.repeat)
                a = _kernels.fill_chart_numpy(*seeded_chart(g, n))
                b = _kernels.fill_chart_numba(*seeded_chart(g, n))
                assert (a == b).all(), "kernels disagree"
                print(f"{name:8} {n:5d} {t_np:11.4f} {t_nb:11.4f} {t_np / t_nb:7.1f}x")
            else:
                print(f"{name:8} {n:5d} {t_np:11.4f} {'-':>11} {'-':>8}")


if __name__ == "__main__":
    main()
