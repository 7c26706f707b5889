"""Brute-force reference implementations used only by the test suite.

Nothing here shares code with the package's dynamic programming.
"""

from functools import lru_cache
from itertools import permutations, product

import numpy as np


@lru_cache(maxsize=None)
def _shapes(p, q):
    """Every alignment of lengths p and q as a string over D (pair), A (gap in
    first), B (gap in second)."""
    if p == 0 and q == 0:
        return ("",)
    out = []
    if p and q:
        out += ["D" + s for s in _shapes(p - 1, q - 1)]
    if q:
        out += ["A" + s for s in _shapes(p, q - 1)]
    if p:
        out += ["B" + s for s in _shapes(p - 1, q)]
    return tuple(out)


def _gap_stats(shape):
    opens = cols = 0
    prev = None
    for c in shape:
        if c != "D":
            cols += 1
            if c != prev:
                opens += 1
        prev = c
    return opens, cols


def _pairs(shape, i0=0, j0=0):
    i, j = i0, j0
    out = []
    for c in shape:
        if c == "D":
            out.append((i, j))
            i += 1
            j += 1
        elif c == "A":
            j += 1
        else:
            i += 1
    return out


class _Table:
    """All candidate alignments for an (m, n) grid, as padded pair indices."""

    def __init__(self, entries, m, n):
        width = max(1, max(len(p) for p, _, _ in entries))
        pad = m * n
        idx = np.full((len(entries), width), pad, dtype=np.int32)
        opens = np.zeros(len(entries))
        cols = np.zeros(len(entries))
        for k, (pairs, o, c) in enumerate(entries):
            for t, (i, j) in enumerate(pairs):
                idx[k, t] = i * n + j
            opens[k] = o
            cols[k] = c
        self.idx, self.opens, self.cols = idx, opens, cols

    def best(self, S, gap_open, gap_extend):
        flat = np.append(S.ravel(), 0.0)
        scores = flat[self.idx].sum(axis=1) - gap_open * self.opens - gap_extend * self.cols
        return scores.max()


@lru_cache(maxsize=None)
def _global_table(m, n):
    entries = [(_pairs(s),) + _gap_stats(s) for s in _shapes(m, n)]
    return _Table(entries, m, n)


@lru_cache(maxsize=None)
def _local_table(m, n):
    # A local optimum never starts or ends with a gap column (penalties are
    # non-negative), so only sub-alignments bounded by pairs are listed.
    entries = []
    for i0, j0 in product(range(m), range(n)):
        for i1, j1 in product(range(i0 + 1, m + 1), range(j0 + 1, n + 1)):
            p, q = i1 - i0, j1 - j0
            if p == 1 or q == 1:
                if p == q == 1:
                    entries.append(([(i0, j0)], 0, 0))
                continue
            for inner in _shapes(p - 2, q - 2):
                s = "D" + inner + "D"
                entries.append((_pairs(s, i0, j0),) + _gap_stats(s))
    return _Table(entries, m, n)


def _subst(a, b, match, mismatch):
    A = np.frombuffer(a.encode(), dtype=np.uint8)[:, None]
    B = np.frombuffer(b.encode(), dtype=np.uint8)[None, :]
    eq = (A == B) & (A != ord("N"))
    return np.where(eq, float(match), float(mismatch))


def brute_global(a, b, match, mismatch, gap_open, gap_extend):
    S = _subst(a, b, match, mismatch)
    return _global_table(len(a), len(b)).best(S, gap_open, gap_extend)


def brute_local(a, b, match, mismatch, gap_open, gap_extend):
    S = _subst(a, b, match, mismatch)
    return max(0.0, _local_table(len(a), len(b)).best(S, gap_open, gap_extend))


def brute_alignments(a, b):
    """Yield every global alignment of a and b as (gapped_a, gapped_b)."""
    for shape in _shapes(len(a), len(b)):
        ra, rb, i, j = [], [], 0, 0
        for c in shape:
            if c == "D":
                ra.append(a[i]); rb.append(b[j]); i += 1; j += 1
            elif c == "A":
                ra.append("-"); rb.append(b[j]); j += 1
            else:
                ra.append(a[i]); rb.append("-"); i += 1
        yield "".join(ra), "".join(rb)


def brute_seeds(query, subject, w):
    """All (qpos, spos) 1-based pairs of identical N-free w-mers."""
    out = []
    for s in range(len(subject) - w + 1):
        word = subject[s : s + w]
        if "N" in word:
            continue
        for q in range(len(query) - w + 1):
            if query[q : q + w] == word:
                out.append((q + 1, s + 1))
    return sorted(out, key=lambda t: (t[1], t[0]))


def brute_best_extent(query, subject, qpos, spos, w, match, mismatch):
    """Best-scoring ungapped extent on the seed diagonal that contains the seed.

    Scans every (left, right) extension pair; returns (score, q_start, q_end)
    with 1-based inclusive coordinates.
    """
    diag = spos - qpos
    q_lo = max(1, 1 - diag)
    q_hi = min(len(query), len(subject) - diag)
    best = None
    for qs in range(q_lo, qpos + 1):
        for qe in range(qpos + w - 1, q_hi + 1):
            sc = sum(
                match if query[k - 1] == subject[k - 1 + diag] != "N" else mismatch
                for k in range(qs, qe + 1)
            )
            key = (sc, -(qe - qs))
            if best is None or key > best[0]:
                best = (key, qs, qe)
    return best[0][0], best[1], best[2]


def brute_max_matching(a, b, ok):
    """Maximum matching between small lists by trying every injection."""
    a, b = list(a), list(b)
    if len(a) > len(b):
        a, b = b, a
        ok_ = ok
        ok = lambda x, y: ok_(y, x)  # noqa: E731
    best = 0
    for perm in permutations(range(len(b)), len(a)):
        best = max(best, sum(1 for x, k in zip(a, perm) if ok(x, b[k])))
    return best


def affine_score(ga, gb, match, mismatch, gap_open, gap_extend):
    """Score a gapped pair; every maximal run of one gap kind opens once."""
    total, prev = 0, None
    for x, y in zip(ga, gb):
        if x == "-" or y == "-":
            kind = "a" if x == "-" else "b"
            total -= gap_extend + (gap_open if kind != prev else 0)
            prev = kind
        else:
            total += match if x == y and x != "N" else mismatch
            prev = None
    return total


def brute_best_global(a, b, match, mismatch, gap_open, gap_extend):
    """(score, list of optimal (gapped_a, gapped_b))."""
    scored = [(affine_score(x, y, match, mismatch, gap_open, gap_extend), x, y) for x, y in brute_alignments(a, b)]
    best = max(s for s, _, _ in scored)
    return best, [(x, y) for s, x, y in scored if s == best]
