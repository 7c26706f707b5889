"""Seed-and-extend homologue search of miRNA queries against long subjects.

The pipeline per query is: exact w-mer seeds on both strands, ungapped
X-drop extension, E-value cutoff, the mature-overlap filter, the mature
length filter, then classification of the best survivor by how far its
mature part deviates from the query's (exact, one or two mismatches, or not
significant).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .align import DEFAULT_SCHEME, PairwiseAlignment, ScoringScheme, column_score, local_align
from .exceptions import NonNegativeExpectedScore, SubjectTooShort, ValidationError
from .seqio import Corpus, Kind, MatureAnnotation, SeqRecord, reverse_complement

_BASE_CODE = np.full(256, 4, dtype=np.int64)
for _i, _c in enumerate("ACGU"):
    _BASE_CODE[ord(_c)] = _i

MAX_WORD_SIZE = 31


class Strand(enum.Enum):
    FORWARD = "+"
    REVERSE_COMPLEMENT = "-"


class MatchClass(enum.Enum):
    EXACT = "exact"
    ONE_MISMATCH = "one_mismatch"
    TWO_MISMATCH = "two_mismatch"
    NOT_SIGNIFICANT = "not_significant"


TALLY_ORDER = (
    MatchClass.EXACT,
    MatchClass.ONE_MISMATCH,
    MatchClass.TWO_MISMATCH,
    MatchClass.NOT_SIGNIFICANT,
)


def _kmer_codes(seq: str, w: int):
    """Integer code of every window and a mask of windows free of ``N``."""
    base = _BASE_CODE[np.frombuffer(seq.encode("ascii"), dtype=np.uint8)]
    nwin = len(seq) - w + 1
    if nwin <= 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=bool)
    is_n = np.concatenate([[0], np.cumsum(base == 4)])
    valid = (is_n[w:] - is_n[:-w]) == 0
    digits = np.where(base == 4, 0, base)
    codes = np.zeros(nwin, dtype=np.int64)
    for k in range(w):
        codes = codes * 4 + digits[k : k + nwin]
    return codes, valid


def _decode(code: int, w: int) -> str:
    out = []
    for _ in range(w):
        out.append("ACGU"[code & 3])
        code >>= 2
    return "".join(reversed(out))


class KmerIndex:
    """Positions of every ``N``-free w-mer of a subject sequence.

    Lookups return sorted 1-based start positions.
    """

    def __init__(self, subject: str, word_size: int = 7):
        if not 4 <= word_size <= MAX_WORD_SIZE:
            raise ValidationError(f"word_size must be in [4, {MAX_WORD_SIZE}]")
        if len(subject) < word_size:
            raise SubjectTooShort(
                f"subject of length {len(subject)} is shorter than word size {word_size}"
            )
        self.word_size = word_size
        self.subject_length = len(subject)
        codes, valid = _kmer_codes(subject, word_size)
        pos = np.flatnonzero(valid) + 1
        codes = codes[valid]
        order = np.argsort(codes, kind="stable")
        self._codes = codes[order]
        self._pos = pos[order]

    def lookup_code(self, code: int) -> np.ndarray:
        lo = np.searchsorted(self._codes, code, side="left")
        hi = np.searchsorted(self._codes, code, side="right")
        return self._pos[lo:hi]

    def __getitem__(self, kmer: str) -> np.ndarray:
        if len(kmer) != self.word_size:
            raise KeyError(kmer)
        codes, valid = _kmer_codes(kmer, self.word_size)
        if not valid[0]:
            return self._pos[:0]
        return self.lookup_code(int(codes[0]))

    def __contains__(self, kmer) -> bool:
        return len(self[kmer]) > 0

    def __len__(self):
        return len(np.unique(self._codes))

    def items(self):
        """Yield ``(kmer, positions)`` for every indexed word, in code order."""
        if not len(self._codes):
            return
        bounds = np.flatnonzero(np.diff(self._codes)) + 1
        starts = np.concatenate([[0], bounds])
        ends = np.concatenate([bounds, [len(self._codes)]])
        for s, e in zip(starts, ends):
            yield _decode(int(self._codes[s]), self.word_size), self._pos[s:e]

    @property
    def table(self) -> dict[str, list[int]]:
        return {k: v.tolist() for k, v in self.items()}


def build_index(subject: str, word_size: int = 7) -> KmerIndex:
    return KmerIndex(subject, word_size)


@dataclass(frozen=True, order=True)
class SeedMatch:
    """Exact w-mer match; `query_pos` indexes the query as read on `strand`."""

    subject_pos: int
    query_pos: int
    strand: Strand = field(compare=False)


def seed_hits(query: str, index: KmerIndex, strand: Strand = Strand.FORWARD) -> list[SeedMatch]:
    w = index.word_size
    if len(query) < w:
        return []
    q = query if strand is Strand.FORWARD else reverse_complement(query)
    codes, valid = _kmer_codes(q, w)
    seeds = []
    for qi in np.flatnonzero(valid):
        for sp in index.lookup_code(int(codes[qi])):
            seeds.append(SeedMatch(int(sp), int(qi) + 1, strand))
    seeds.sort()
    return seeds


def _extend_side(query, subject, qi, si, step, match, mismatch, x_drop):
    """Walk from (qi, si) in direction `step`; return (best gain, length)."""
    run = best = 0
    best_len = n = 0
    while 0 <= qi < len(query) and 0 <= si < len(subject):
        x = query[qi]
        run += match if x == subject[si] and x != "N" else mismatch
        n += 1
        if run > best:
            best, best_len = run, n
        elif best - run > x_drop:
            break
        qi += step
        si += step
    return best, best_len


def extend_hit(
    seed: SeedMatch,
    query: str,
    subject: str,
    scheme: ScoringScheme = DEFAULT_SCHEME,
    x_drop: int = 20,
    word_size: int = 7,
) -> PairwiseAlignment:
    """Ungapped two-sided X-drop extension of a seed.

    `query` must already be oriented for ``seed.strand``.  Among equally
    scoring extents the shortest is returned.
    """
    q0, s0 = seed.query_pos - 1, seed.subject_pos - 1
    w = word_size
    right, rlen = _extend_side(
        query, subject, q0 + w, s0 + w, 1, scheme.match_score, scheme.mismatch_score, x_drop
    )
    left, llen = _extend_side(
        query, subject, q0 - 1, s0 - 1, -1, scheme.match_score, scheme.mismatch_score, x_drop
    )
    qs, qe = q0 - llen, q0 + w + rlen
    ss, se = s0 - llen, s0 + w + rlen
    aa, bb = query[qs:qe], subject[ss:se]
    ident = sum(1 for x, y in zip(aa, bb) if x == y and x != "N")
    return PairwiseAlignment(
        aa, bb, qs + 1, qe, ss + 1, se,
        column_score(aa, bb, scheme), ident, len(aa) - ident, 0,
    )


@dataclass(frozen=True)
class KarlinAltschulParams:
    lam: float
    k: float
    background: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)


def calibrate(
    scheme: ScoringScheme = DEFAULT_SCHEME,
    background=(0.25, 0.25, 0.25, 0.25),
    k: float = 0.1,
) -> KarlinAltschulParams:
    """Solve ``sum_ij p_i p_j exp(lam * s_ij) = 1`` for the positive root by bisection."""
    p = np.asarray(background, dtype=float)
    if p.shape != (4,) or abs(p.sum() - 1.0) > 1e-9 or (p < 0).any():
        raise ValidationError("background must be 4 probabilities summing to 1")
    s = np.full((4, 4), float(scheme.mismatch_score))
    np.fill_diagonal(s, scheme.match_score)
    pp = np.outer(p, p)
    if (pp * s).sum() >= 0:
        raise NonNegativeExpectedScore("expected pair score must be negative")

    def f(lam):
        return float((pp * np.exp(lam * s)).sum() - 1.0)

    lo, hi = 0.0, 10.0
    if f(hi) <= 0:
        raise ValidationError("no root in (0, 10]")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    lam = lo if abs(f(lo)) < abs(f(hi)) else hi
    return KarlinAltschulParams(lam, k, tuple(float(x) for x in p))


def e_value(score: float, query_len: int, subject_len: int, params: KarlinAltschulParams) -> float:
    if query_len < 1 or subject_len < 1:
        raise ValidationError("sequence lengths must be >= 1")
    return params.k * query_len * subject_len * math.exp(-params.lam * score)


@dataclass(frozen=True)
class SearchHit:
    query_id: str
    subject_id: str
    strand: Strand
    alignment: PairwiseAlignment  # query side is oriented for `strand`
    query_length: int
    e_value: float
    mature_id: str = ""
    mature_overlap: int = 0
    mature_mismatches: int = 0
    mature_gaps: int = 0
    mature_uncovered: int = 0
    hit_mature_length: int = 0
    match_class: MatchClass = MatchClass.NOT_SIGNIFICANT

    @property
    def q_start(self) -> int:
        """Start in original (forward) query coordinates."""
        if self.strand is Strand.FORWARD:
            return self.alignment.a_start
        return self.query_length - self.alignment.a_end + 1

    @property
    def q_end(self) -> int:
        if self.strand is Strand.FORWARD:
            return self.alignment.a_end
        return self.query_length - self.alignment.a_start + 1

    @property
    def s_start(self) -> int:
        return self.alignment.b_start

    @property
    def s_end(self) -> int:
        return self.alignment.b_end

    @property
    def score(self) -> int:
        return self.alignment.score

    @property
    def deviation(self) -> int:
        return self.mature_mismatches + self.mature_gaps + self.mature_uncovered


def _oriented_span(hit: SearchHit, ann: MatureAnnotation) -> tuple[int, int]:
    if hit.strand is Strand.FORWARD:
        return ann.start, ann.end
    m = hit.query_length
    return m - ann.end + 1, m - ann.start + 1


def mature_overlap_filter(hit: SearchHit, ann: MatureAnnotation) -> tuple[bool, int]:
    """Keep a hit only if its query span touches the mature part."""
    overlap = min(hit.q_end, ann.end) - max(hit.q_start, ann.start) + 1
    overlap = max(0, overlap)
    return overlap >= 1, overlap


def length_diff_filter(hit_mature_len: int, query_mature_len: int, max_diff: int = 2) -> bool:
    if hit_mature_len < 1 or query_mature_len < 1:
        return False
    return abs(hit_mature_len - query_mature_len) <= max_diff


def mature_stats(hit: SearchHit, ann: MatureAnnotation) -> SearchHit:
    """Attach mature-restricted mismatch, gap and coverage counts to `hit`."""
    lo, hi = _oriented_span(hit, ann)
    al = hit.alignment
    qpos = al.a_start - 1
    mism = gaps = covered = subj = 0
    for x, y in zip(al.aligned_a, al.aligned_b):
        if x != "-":
            qpos += 1
        inside = lo <= qpos <= hi and not (x == "-" and qpos == hi)
        if not inside:
            continue
        if x == "-":
            gaps += 1
            subj += 1
        elif y == "-":
            gaps += 1
            covered += 1
        else:
            covered += 1
            subj += 1
            if x != y or x == "N":
                mism += 1
    return replace(
        hit,
        mature_id=ann.mature_id,
        mature_overlap=covered,
        mature_mismatches=mism,
        mature_gaps=gaps,
        mature_uncovered=ann.length - covered,
        hit_mature_length=subj,
    )


def classify_match(hit: SearchHit | None) -> MatchClass:
    """Bucket a filtered hit by mismatches + gap columns + uncovered mature
    positions; no hit (or more than two deviations) is not significant."""
    if hit is None:
        return MatchClass.NOT_SIGNIFICANT
    return {
        0: MatchClass.EXACT,
        1: MatchClass.ONE_MISMATCH,
        2: MatchClass.TWO_MISMATCH,
    }.get(hit.deviation, MatchClass.NOT_SIGNIFICANT)


@dataclass(frozen=True)
class SearchParams:
    word_size: int = 7
    e_cutoff: float = 10.0
    scheme: ScoringScheme = DEFAULT_SCHEME
    x_drop: int = 20
    strands: tuple[Strand, ...] = (Strand.FORWARD, Strand.REVERSE_COMPLEMENT)
    k: float = 0.1
    max_length_diff: int = 2
    gapped: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.word_size < 4:
            raise ValidationError("word_size must be >= 4")
        if self.e_cutoff <= 0:
            raise ValidationError("e_cutoff must be > 0")
        if self.x_drop < 0:
            raise ValidationError("x_drop must be >= 0")
        if not self.strands:
            raise ValidationError("at least one strand must be searched")

    def header(self) -> str:
        s = self.scheme
        strands = "both" if len(set(self.strands)) == 2 else self.strands[0].value
        return (
            f"word_size={self.word_size} e_cutoff={self.e_cutoff:g} "
            f"match={s.match_score} mismatch={s.mismatch_score} "
            f"gap_open={s.gap_open} gap_extend={s.gap_extend} x_drop={self.x_drop} "
            f"strands={strands} k={self.k:g} gapped={'yes' if self.gapped else 'no'}"
        )


@dataclass(frozen=True)
class QueryResult:
    query_id: str
    best: SearchHit | None
    match_class: MatchClass
    candidates: tuple[SearchHit, ...] = ()


@dataclass(frozen=True)
class SearchReport:
    subject_id: str
    results: tuple[QueryResult, ...]

    @property
    def hits(self) -> list[SearchHit]:
        return [r.best for r in self.results if r.best is not None]

    @property
    def tally(self) -> dict[MatchClass, int]:
        out = {c: 0 for c in TALLY_ORDER}
        for r in self.results:
            out[r.match_class] += 1
        return out


def _overlaps(a: PairwiseAlignment, b: PairwiseAlignment) -> bool:
    return a.b_start <= b.b_end and b.b_start <= a.b_end


def _candidate_alignments(query, subject, index, strand, params):
    oriented = query if strand is Strand.FORWARD else reverse_complement(query)
    w = index.word_size
    reach: dict[int, int] = {}  # diagonal -> last subject position already extended
    found = []
    for seed in seed_hits(query, index, strand):
        diag = seed.subject_pos - seed.query_pos
        if seed.subject_pos + w - 1 <= reach.get(diag, 0):
            continue
        al = extend_hit(seed, oriented, subject, params.scheme, params.x_drop, w)
        reach[diag] = max(reach.get(diag, 0), al.b_end)
        found.append(al)
    # overlapping extents on one strand collapse to the best scoring one
    found.sort(key=lambda a: (-a.score, a.b_start, a.a_start))
    kept: list[PairwiseAlignment] = []
    for al in found:
        if not any(_overlaps(al, k) for k in kept):
            kept.append(al)
    if params.gapped:
        kept = [_gapped_rescore(oriented, subject, al, params.scheme) for al in kept]
    return oriented, kept


def _gapped_rescore(query, subject, al, scheme):
    pad = len(query)
    lo = max(0, al.b_start - 1 - pad)
    hi = min(len(subject), al.b_end + pad)
    g = local_align(query, subject[lo:hi], scheme)
    if g.score <= al.score:
        return al
    return replace(g, b_start=g.b_start + lo, b_end=g.b_end + lo)


def _best_key(h: SearchHit):
    return (-h.score, h.e_value, h.s_start, h.strand is not Strand.FORWARD, h.deviation)


def search_one(
    query: SeqRecord,
    annotations: list[MatureAnnotation],
    subject: SeqRecord,
    index: KmerIndex,
    params: SearchParams,
    ka: KarlinAltschulParams,
) -> QueryResult:
    """Search one query; without annotations the whole query is its mature part."""
    if not annotations:
        annotations = [MatureAnnotation(query.id, query.id, 1, len(query))]
    m, n = len(query), len(subject)
    candidates = []
    survivors = []
    for strand in params.strands:
        _, alignments = _candidate_alignments(query.residues, subject.residues, index, strand, params)
        for al in alignments:
            ev = e_value(al.score, m, n, ka)
            if ev > params.e_cutoff:
                continue
            hit = SearchHit(query.id, subject.id, strand, al, m, ev)
            candidates.append(hit)
            for ann in annotations:
                keep, _ = mature_overlap_filter(hit, ann)
                if not keep:
                    continue
                h = mature_stats(hit, ann)
                if not length_diff_filter(h.hit_mature_length, ann.length, params.max_length_diff):
                    continue
                survivors.append(replace(h, match_class=classify_match(h)))
    candidates.sort(key=_best_key)
    best = min(survivors, key=_best_key) if survivors else None
    cls = best.match_class if best is not None else MatchClass.NOT_SIGNIFICANT
    return QueryResult(query.id, best, cls, tuple(candidates))


def search(
    queries: Corpus | list[SeqRecord],
    subject: SeqRecord,
    params: SearchParams = SearchParams(),
    index: KmerIndex | None = None,
    annotations: list[MatureAnnotation] | None = None,
) -> SearchReport:
    """Search every query against `subject`; results keep the query order.

    `queries` may be a :class:`Corpus` (annotations taken from it, genome
    records skipped) or a plain list of records plus `annotations`.
    """
    if isinstance(queries, Corpus):
        annotations = list(queries.annotations) if annotations is None else annotations
        records = [r for r in queries.records.values() if r.kind is not Kind.GENOME]
    else:
        records = list(queries)
    annotations = annotations or []
    by_query: dict[str, list[MatureAnnotation]] = {}
    for a in annotations:
        by_query.setdefault(a.precursor_id, []).append(a)
    if index is None:
        index = build_index(subject.residues, params.word_size)
    elif index.word_size != params.word_size:
        raise ValidationError("index word size differs from search parameters")
    ka = calibrate(params.scheme, k=params.k)

    def run(rec):
        return search_one(rec, by_query.get(rec.id, []), subject, index, params, ka)

    if params.workers > 1:
        with ThreadPoolExecutor(params.workers) as pool:
            results = list(pool.map(run, records))
    else:
        results = [run(r) for r in records]
    return SearchReport(subject.id, tuple(results))


def format_evalue(e: float) -> str:
    if e == 0:
        return "0"
    if e < 1e-2:
        return f"{e:.2e}"
    return f"{e:.3g}"


HIT_COLUMNS = (
    "query_id", "subject_id", "strand", "q_start", "q_end", "s_start", "s_end",
    "score", "evalue", "mismatches", "gaps", "class",
)


def format_hits(reports: list[SearchReport], params: SearchParams) -> str:
    lines = [f"# {params.header()}", "#" + "\t".join(HIT_COLUMNS)]
    for rep in reports:
        for r in rep.results:
            h = r.best
            if h is None:
                lines.append("\t".join([r.query_id, rep.subject_id] + ["."] * 9 + [r.match_class.value]))
                continue
            lines.append("\t".join(str(x) for x in (
                h.query_id, h.subject_id, h.strand.value, h.q_start, h.q_end,
                h.s_start, h.s_end, h.score, format_evalue(h.e_value),
                h.alignment.mismatches, h.alignment.gap_columns, h.match_class.value,
            )))
    return "\n".join(lines) + "\n"


def format_tally(reports: list[SearchReport], params: SearchParams) -> str:
    lines = [f"# {params.header()}", "\t".join(c.value for c in TALLY_ORDER)]
    for rep in reports:
        if len(reports) > 1:
            lines.append(f"# subject={rep.subject_id}")
        t = rep.tally
        lines.append("\t".join(str(t[c]) for c in TALLY_ORDER))
    return "\n".join(lines) + "\n"
