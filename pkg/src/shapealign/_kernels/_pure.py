"""Pure-numpy fallback for the DP kernels.

Matches the compiled extension bitwise: the integer NW recurrences are exact,
and the float cyclic-matching scan applies operations in the same order as
the Cython loop (left-gap chains are resolved with a prefix min over
``q[j] - j*skip`` in both backends).
"""

import numpy as np


def nw_fill(s1, s2, sub, gap):
    """Fill the full (len(s2)+1, len(s1)+1) score grid, zero borders.

    ``s1``/``s2`` are uint8 code arrays, ``sub`` a square int64 score table,
    ``gap`` an int64 scalar. Interior cells follow
    ``F[i,j] = max(F[i-1,j-1] + sub[s2[i-1], s1[j-1]], F[i-1,j] + gap, F[i,j-1] + gap)``.
    """
    n = len(s2)
    m = len(s1)
    F = np.zeros((n + 1, m + 1), dtype=np.int64)
    if n == 0 or m == 0:
        return F
    gap = np.int64(gap)
    jg = np.arange(m + 1, dtype=np.int64) * gap
    subrows = sub[s2.astype(np.intp)][:, s1.astype(np.intp)]
    q = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        prev = F[i - 1]
        q[0] = 0
        # best of diagonal and up moves; left-gap chains via the prefix scan
        np.maximum(prev[:-1] + subrows[i - 1], prev[1:] + gap, out=q[1:])
        F[i] = np.maximum.accumulate(q - jg) + jg
    return F


def nw_score(s1, s2, sub, gap):
    """Final NW cell only (rolling row); same recurrence as nw_fill."""
    n = len(s2)
    m = len(s1)
    if n == 0 or m == 0:
        return 0
    gap = np.int64(gap)
    jg = np.arange(m + 1, dtype=np.int64) * gap
    subrows = sub[s2.astype(np.intp)][:, s1.astype(np.intp)]
    row = np.zeros(m + 1, dtype=np.int64)
    q = np.empty(m + 1, dtype=np.int64)
    for i in range(n):
        q[0] = 0
        np.maximum(row[:-1] + subrows[i], row[1:] + gap, out=q[1:])
        row = np.maximum.accumulate(q - jg) + jg
    return int(row[m])


def cyclic_best_offset(cost, skip):
    """Scan all column rotations of ``cost``; return (offset, total) of the
    cheapest monotone alignment (diagonal = cost entry, skips = ``skip``).

    Lowest offset wins ties (strict < while scanning ascending).
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    js = np.arange(m + 1, dtype=np.float64) * skip
    best_offset = 0
    best_total = np.inf
    q = np.empty(m + 1, dtype=np.float64)
    for offset in range(m):
        rot = np.roll(cost, -offset, axis=1)
        row = js.copy()
        for i in range(1, n + 1):
            q[0] = i * skip
            np.minimum(row[:-1] + rot[i - 1], row[1:] + skip, out=q[1:])
            row = np.minimum.accumulate(q - js) + js
        total = float(row[m])
        if total < best_total:
            best_total = total
            best_offset = offset
    return best_offset, best_total
