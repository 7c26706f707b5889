"""Affine-gap dynamic-programming alignment.

Global (Needleman-Wunsch/Gotoh), local (Smith-Waterman/Gotoh) and
profile-profile alignment all run on one kernel that consumes a precomputed
column-by-column substitution matrix, so a sequence is just a profile of
depth one.

Traceback ties resolve in the order diagonal, gap in `a`, gap in `b`.
A gap of length ``L`` costs ``gap_open + L * gap_extend``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import EmptyAlignment, EmptySequence

SYMBOLS = "ACGUN-"
GAP = 5
N_CODE = 4

_ENCODE = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(SYMBOLS):
    _ENCODE[ord(_c)] = _i

# traceback operations
DIAG, GAP_IN_A, GAP_IN_B = 0, 1, 2
_NEG = -1e300


@dataclass(frozen=True)
class ScoringScheme:
    """Match/mismatch scores and affine gap penalties (penalties are positive)."""

    match_score: int = 5
    mismatch_score: int = -4
    gap_open: int = 10
    gap_extend: int = 1

    def __post_init__(self):
        if self.match_score <= 0:
            raise ValueError("match_score must be > 0")
        if self.mismatch_score >= 0:
            raise ValueError("mismatch_score must be < 0")
        if self.gap_open < 0 or self.gap_extend < 0:
            raise ValueError("gap penalties must be >= 0")
        if 0.25 * self.match_score + 0.75 * self.mismatch_score >= 0:
            raise ValueError("expected score under a uniform background must be negative")

    def pair_score(self, x: str, y: str) -> int:
        if x == y and x != "N":
            return self.match_score
        return self.mismatch_score

    def gap_cost(self, length: int) -> int:
        return self.gap_open + length * self.gap_extend

    def symbol_matrix(self) -> np.ndarray:
        """6x6 score table over ``ACGUN-`` used for profile columns.

        A residue against an existing gap scores ``-gap_extend``; gap against
        gap scores 0; ``N`` mismatches everything, itself included.
        """
        m = np.full((6, 6), float(self.mismatch_score))
        for i in range(4):
            m[i, i] = self.match_score
        m[GAP, :] = -self.gap_extend
        m[:, GAP] = -self.gap_extend
        m[GAP, GAP] = 0.0
        return m


DEFAULT_SCHEME = ScoringScheme()


def encode(seq: str) -> np.ndarray:
    codes = _ENCODE[np.frombuffer(seq.encode("ascii"), dtype=np.uint8)]
    if (codes == 255).any():
        bad = int(np.argmax(codes == 255))
        raise ValueError(f"symbol {seq[bad]!r} not in {SYMBOLS}")
    return codes


def substitution_matrix(a: str, b: str, scheme: ScoringScheme) -> np.ndarray:
    return scheme.symbol_matrix()[np.ix_(encode(a), encode(b))]


@njit(cache=True)
def _fill_and_trace(S, gap_open, gap_extend, local):
    """Three-state Gotoh DP over score matrix `S`.

    Returns ``(score, ops, i0, i1, j0, j1)`` where ops is the traceback in
    forward order and the spans are 0-based half-open.
    """
    m, n = S.shape
    oe = gap_open + gap_extend
    D = np.full((m + 1, n + 1), _NEG)
    A = np.full((m + 1, n + 1), _NEG)  # gap in a: consumes b[j]
    B = np.full((m + 1, n + 1), _NEG)  # gap in b: consumes a[i]
    pD = np.zeros((m + 1, n + 1), dtype=np.int8)
    pA = np.zeros((m + 1, n + 1), dtype=np.int8)
    pB = np.zeros((m + 1, n + 1), dtype=np.int8)
    if not local:
        D[0, 0] = 0.0
        pD[0, 0] = -1
    for i in range(m + 1):
        for j in range(n + 1):
            if i > 0 and j > 0:
                d, a, b = D[i - 1, j - 1], A[i - 1, j - 1], B[i - 1, j - 1]
                best, src = d, 0
                if a > best:
                    best, src = a, 1
                if b > best:
                    best, src = b, 2
                if local and best <= 0.0:
                    best, src = 0.0, -1
                D[i, j] = best + S[i - 1, j - 1]
                pD[i, j] = src
            if j > 0:
                best, src = D[i, j - 1] - oe, 0
                v = A[i, j - 1] - gap_extend
                if v > best:
                    best, src = v, 1
                v = B[i, j - 1] - oe
                if v > best:
                    best, src = v, 2
                A[i, j] = best
                pA[i, j] = src
            if i > 0:
                best, src = D[i - 1, j] - oe, 0
                v = A[i - 1, j] - oe
                if v > best:
                    best, src = v, 1
                v = B[i - 1, j] - gap_extend
                if v > best:
                    best, src = v, 2
                B[i, j] = best
                pB[i, j] = src

    if local:
        score, ei, ej = 0.0, 0, 0
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                if D[i, j] > score:
                    score, ei, ej = D[i, j], i, j
        if score <= 0.0:
            return 0.0, np.zeros(0, dtype=np.int8), 0, 0, 0, 0
        state = 0
    else:
        ei, ej = m, n
        score, state = D[m, n], 0
        if A[m, n] > score:
            score, state = A[m, n], 1
        if B[m, n] > score:
            score, state = B[m, n], 2

    ops = np.empty(m + n, dtype=np.int8)
    k = 0
    i, j = ei, ej
    while True:
        if state == 0:
            if i == 0 and j == 0:
                break
            prev = pD[i, j]
            ops[k] = 0
            k += 1
            i -= 1
            j -= 1
            if prev == -1:
                break
        elif state == 1:
            prev = pA[i, j]
            ops[k] = 1
            k += 1
            j -= 1
        else:
            prev = pB[i, j]
            ops[k] = 2
            k += 1
            i -= 1
        state = prev
    return score, ops[:k][::-1].copy(), i, ei, j, ej


def align_matrix(S: np.ndarray, gap_open: float, gap_extend: float, local: bool = False):
    """Run the DP on an arbitrary substitution matrix.

    Returns ``(score, ops, (i0, i1), (j0, j1))`` with 0-based half-open spans.
    """
    S = np.ascontiguousarray(S, dtype=np.float64)
    score, ops, i0, i1, j0, j1 = _fill_and_trace(
        S, float(gap_open), float(gap_extend), bool(local)
    )
    return score, ops, (i0, i1), (j0, j1)


@dataclass(frozen=True)
class PairwiseAlignment:
    aligned_a: str
    aligned_b: str
    a_start: int
    a_end: int
    b_start: int
    b_end: int
    score: int
    identities: int
    mismatches: int
    gap_columns: int

    def __len__(self):
        return len(self.aligned_a)

    @property
    def is_empty(self) -> bool:
        return len(self.aligned_a) == 0


def column_score(aligned_a: str, aligned_b: str, scheme: ScoringScheme) -> int:
    """Score a gapped pair column by column; each gap run pays `gap_open` once."""
    total = 0
    run = None
    for x, y in zip(aligned_a, aligned_b):
        if x == "-" or y == "-":
            kind = "a" if x == "-" else "b"
            if kind != run:
                total -= scheme.gap_open
            total -= scheme.gap_extend
            run = kind
        else:
            total += scheme.pair_score(x, y)
            run = None
    return total


def alignment_from_ops(a, b, ops, a0, b0, scheme) -> PairwiseAlignment:
    """Build a :class:`PairwiseAlignment` from traceback operations.

    `a0`, `b0` are 0-based offsets of the first aligned residue.
    """
    ra, rb = [], []
    i, j = a0, b0
    ident = mism = gaps = 0
    for op in ops:
        if op == DIAG:
            x, y = a[i], b[j]
            ra.append(x)
            rb.append(y)
            if x == y and x != "N":
                ident += 1
            else:
                mism += 1
            i += 1
            j += 1
        elif op == GAP_IN_A:
            ra.append("-")
            rb.append(b[j])
            gaps += 1
            j += 1
        else:
            ra.append(a[i])
            rb.append("-")
            gaps += 1
            i += 1
    aa, bb = "".join(ra), "".join(rb)
    if not aa:
        return PairwiseAlignment("", "", 0, 0, 0, 0, 0, 0, 0, 0)
    return PairwiseAlignment(
        aa, bb, a0 + 1, i, b0 + 1, j, column_score(aa, bb, scheme), ident, mism, gaps
    )


def _check(a, b):
    if not a or not b:
        raise EmptySequence("both sequences must be non-empty")


def global_align(a: str, b: str, scheme: ScoringScheme = DEFAULT_SCHEME) -> PairwiseAlignment:
    """Optimal end-to-end alignment with affine gaps.

    >>> global_align("AAAA", "AAA").score
    4
    """
    _check(a, b)
    _, ops, (i0, _), (j0, _) = align_matrix(
        substitution_matrix(a, b, scheme), scheme.gap_open, scheme.gap_extend
    )
    return alignment_from_ops(a, b, ops, i0, j0, scheme)


def local_align(a: str, b: str, scheme: ScoringScheme = DEFAULT_SCHEME) -> PairwiseAlignment:
    """Optimal local alignment; an empty alignment (score 0) if nothing scores."""
    _check(a, b)
    _, ops, (i0, _), (j0, _) = align_matrix(
        substitution_matrix(a, b, scheme), scheme.gap_open, scheme.gap_extend, local=True
    )
    return alignment_from_ops(a, b, ops, i0, j0, scheme)


def fractional_identity(al: PairwiseAlignment) -> float:
    total = al.identities + al.mismatches + al.gap_columns
    if total == 0:
        raise EmptyAlignment("identity of an empty alignment is undefined")
    return al.identities / total


@dataclass(frozen=True)
class Profile:
    """Aligned group of sequences summarised as per-column symbol frequencies.

    ``columns`` has shape ``(ncols, 6)`` over ``ACGUN-``; ``rows`` keeps the
    gapped member strings so the group can be expanded back into an MSA.
    """

    columns: np.ndarray
    member_ids: tuple[str, ...]
    rows: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.member_ids)

    def __len__(self):
        return self.columns.shape[0]

    @classmethod
    def from_rows(cls, ids, rows) -> "Profile":
        rows = tuple(rows)
        if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
            raise ValueError("profile rows must be non-empty and of equal length")
        codes = np.stack([encode(r) for r in rows])
        counts = np.zeros((codes.shape[1], 6))
        for s in range(6):
            counts[:, s] = (codes == s).sum(axis=0)
        return cls(counts / len(rows), tuple(ids), rows)

    @classmethod
    def from_sequence(cls, seq_id: str, seq: str) -> "Profile":
        return cls.from_rows([seq_id], [seq])


@dataclass(frozen=True)
class ProfileAlignment:
    profile: Profile
    p_columns: tuple  # per merged column: source column in p, or None
    q_columns: tuple
    score: float


def _expand(rows, cols):
    out = []
    for r in rows:
        out.append("".join("-" if c is None else r[c] for c in cols))
    return out


def profile_align(p: Profile, q: Profile, scheme: ScoringScheme = DEFAULT_SCHEME) -> ProfileAlignment:
    """Globally align two profiles and merge them.

    Column-vs-column score is the frequency-weighted mean of pairwise symbol
    scores.  Gaps already present in either profile are kept, and new gap
    columns are inserted whole.
    """
    if len(p) == 0 or len(q) == 0:
        raise EmptySequence("profiles must be non-empty")
    sym = scheme.symbol_matrix()
    S = p.columns @ sym @ q.columns.T
    score, ops, _, _ = align_matrix(S, scheme.gap_open, scheme.gap_extend)
    pc, qc = [], []
    i = j = 0
    for op in ops:
        if op == DIAG:
            pc.append(i)
            qc.append(j)
            i += 1
            j += 1
        elif op == GAP_IN_A:
            pc.append(None)
            qc.append(j)
            j += 1
        else:
            pc.append(i)
            qc.append(None)
            i += 1
    rows = _expand(p.rows, pc) + _expand(q.rows, qc)
    merged = Profile.from_rows(p.member_ids + q.member_ids, rows)
    return ProfileAlignment(merged, tuple(pc), tuple(qc), float(score))
