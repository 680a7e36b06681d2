"""Boolean CYK chart kernels.

The chart is a ``(n+1, n+1, V)`` boolean array; ``chart[r, c, w]`` says
nonterminal ``w`` derives tokens ``r..c-1`` under some hole completion.
Only the superdiagonal is filled on entry.

Set ``BCFL_DISABLE_NUMBA=1`` to force the pure-numpy path.
"""

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

DISABLED = os.environ.get("BCFL_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")
HAVE_NUMBA = njit is not None


def fill_chart_numpy(chart, lefts, rights, parents):
    n = chart.shape[0] - 1
    if lefts.size == 0:
        return chart
    for span in range(2, n + 1):
        for r in range(0, n - span + 1):
            c = r + span
            # rows: split points k in (r, c); cols: binary rules
            hits = chart[r, r + 1:c][:, lefts] & chart[r + 1:c, c][:, rights]
            fired = hits.any(axis=0)
            if fired.any():
                chart[r, c, parents[fired]] = True
    return chart


def _fill_chart_py(chart, lefts, rights, parents):
    n = chart.shape[0] - 1
    nrules = lefts.shape[0]
    for span in range(2, n + 1):
        for r in range(0, n - span + 1):
            c = r + span
            for k in range(r + 1, c):
                for p in range(nrules):
                    if chart[r, k, lefts[p]] and chart[k, c, rights[p]]:
                        chart[r, c, parents[p]] = True
    return chart


if HAVE_NUMBA:
    fill_chart_numba = njit(cache=True, nogil=True)(_fill_chart_py)
else:  # pragma: no cover
    fill_chart_numba = None


def backend() -> str:
    return "numba" if HAVE_NUMBA and not DISABLED else "numpy"


def fill_chart(chart, lefts, rights, parents):
    if backend() == "numba":
        return fill_chart_numba(chart, lefts, rights, parents)
    return fill_chart_numpy(chart, lefts, rights, parents)


def empty_chart(n: int, num_nonterminals: int):
    return np.zeros((n + 1, n + 1, num_nonterminals), dtype=np.bool_)
