"""Column conservation, conserved blocks and mature-sequence localization.

A column's score is the frequency of its most common residue with gaps in
the denominator only.  Blocks are runs of gap-free columns scoring at least
``tau`` whose two end columns also reach the stricter ``flank`` score (as in
Gblocks, where block flanks must be highly conserved), at least ``l_min``
columns long.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .exceptions import AnnotationRowMissing, EmptyInput, ValidationError
from .msa import Msa
from .seqio import MatureAnnotation, species_from_id

NEAR_LIMIT = 2
DEFAULT_FLANK = 0.85


def default_tau(depth: int) -> float:
    """0.66 for alignments of at most three rows (two of three agreeing), else 0.9."""
    return 0.66 if depth <= 3 else 0.9


@dataclass(frozen=True)
class ConservationProfile:
    scores: np.ndarray
    gap_fractions: np.ndarray
    depth: int

    def __len__(self):
        return len(self.scores)


def conservation_profile(msa: Msa) -> ConservationProfile:
    n = len(msa)
    scores = np.empty(msa.ncols)
    gaps = np.empty(msa.ncols)
    for k in range(msa.ncols):
        col = [r[k] for r in msa.rows]
        counts = Counter(c for c in col if c != "-")
        scores[k] = max(counts.values(), default=0) / n
        gaps[k] = (n - sum(counts.values())) / n
    return ConservationProfile(scores, gaps, n)


@dataclass(frozen=True)
class ConservedBlock:
    start_col: int  # 1-based inclusive MSA columns
    end_col: int
    mean_score: float
    per_row_subsequences: dict[str, str]
    per_row_spans: dict[str, tuple[int, int] | None]

    @property
    def length(self) -> int:
        return self.end_col - self.start_col + 1


def _row_span(row: str, start_col: int, end_col: int):
    before = sum(1 for c in row[: start_col - 1] if c != "-")
    sub = row[start_col - 1 : end_col].replace("-", "")
    if not sub:
        return sub, None
    return sub, (before + 1, before + len(sub))


def conserved_blocks(
    profile: ConservationProfile,
    tau: float | None = None,
    l_min: int = 15,
    msa: Msa | None = None,
    flank: float = DEFAULT_FLANK,
    max_gap_fraction: float = 0.0,
) -> list[ConservedBlock]:
    """Conserved blocks, left to right.

    Parameters
    ----------
    profile : ConservationProfile
    tau : float, optional
        Minimum column score inside a block; defaults to
        :func:`default_tau` of the alignment depth.
    l_min : int
        Minimum block length in columns.
    msa : Msa, optional
        When given, per-row degapped slices and sequence spans are attached.
    flank : float
        Minimum score of a block's first and last column.  Values at or
        below `tau` disable end trimming.
    max_gap_fraction : float
        Columns with a larger fraction of gaps never join a block.
    """
    tau = default_tau(profile.depth) if tau is None else tau
    if not 0 < tau <= 1:
        raise ValidationError("tau must be in (0, 1]")
    if l_min < 1:
        raise ValidationError("l_min must be >= 1")
    ok = (profile.scores >= tau) & (profile.gap_fractions <= max_gap_fraction)
    edge_ok = ok & (profile.scores >= max(flank, tau))
    blocks = []
    k, n = 0, len(ok)
    while k < n:
        if not ok[k]:
            k += 1
            continue
        run_end = k
        while run_end + 1 < n and ok[run_end + 1]:
            run_end += 1
        lo, hi = k, run_end
        while lo <= hi and not edge_ok[lo]:
            lo += 1
        while hi >= lo and not edge_ok[hi]:
            hi -= 1
        if hi >= lo and hi - lo + 1 >= l_min:
            subs, spans = {}, {}
            if msa is not None:
                for rid, row in zip(msa.ids, msa.rows):
                    subs[rid], spans[rid] = _row_span(row, lo + 1, hi + 1)
            blocks.append(
                ConservedBlock(lo + 1, hi + 1, float(profile.scores[lo : hi + 1].mean()), subs, spans)
            )
        k = run_end + 1
    return blocks


class Relation(enum.Enum):
    INSIDE = "inside"
    NEAR = "near"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class MatureLocalization:
    mature_id: str
    precursor_id: str
    relation: Relation
    block_index: int | None = None  # 1-based
    offset: int = 0  # mature residues lying outside the block
    family: str = ""


def localize_mature(msa: Msa, blocks: list[ConservedBlock], ann: MatureAnnotation, family: str = "") -> MatureLocalization:
    """Place a mature sequence relative to the blocks of its precursor's row.

    Inside: every mature residue maps into one block.  Near(k): the block
    with the largest overlap leaves k <= 2 mature residues outside it.
    Outside: anything else.
    """
    if ann.precursor_id not in msa.ids:
        raise AnnotationRowMissing(ann.precursor_id)
    cols = msa.residue_columns(ann.precursor_id)
    if ann.end > len(cols):
        raise ValidationError(f"mature {ann.mature_id} extends past its alignment row")
    mature_cols = cols[ann.start - 1 : ann.end]
    best_idx, best_overlap = None, 0
    for idx, b in enumerate(blocks, start=1):
        overlap = sum(1 for c in mature_cols if b.start_col <= c <= b.end_col)
        if overlap > best_overlap:
            best_idx, best_overlap = idx, overlap
    outside = len(mature_cols) - best_overlap
    if best_idx is not None and outside == 0:
        return MatureLocalization(ann.mature_id, ann.precursor_id, Relation.INSIDE, best_idx, 0, family)
    if best_idx is not None and outside <= NEAR_LIMIT:
        return MatureLocalization(ann.mature_id, ann.precursor_id, Relation.NEAR, best_idx, outside, family)
    return MatureLocalization(ann.mature_id, ann.precursor_id, Relation.OUTSIDE, None, 0, family)


@dataclass(frozen=True)
class ConservationStats:
    inside_pct: float
    near_pct: float
    outside_pct: float
    n: int


def conservation_stats(localizations) -> ConservationStats:
    locs = list(localizations)
    if not locs:
        raise EmptyInput("no localizations")
    n = len(locs)
    counts = Counter(loc.relation for loc in locs)
    pct = [round(100.0 * counts[r] / n, 1) for r in Relation]
    return ConservationStats(*pct, n)


@dataclass(frozen=True)
class MultiRegionReport:
    family: str
    blocks: tuple[ConservedBlock, ...]
    occupants: tuple[tuple[str, ...], ...]  # mature ids per block, in block order

    @property
    def empty_blocks(self) -> list[int]:
        return [i for i, occ in enumerate(self.occupants, start=1) if not occ]

    def block_of_species(self, species: str) -> list[int]:
        return [
            i
            for i, occ in enumerate(self.occupants, start=1)
            if any(species_from_id(m) == species for m in occ)
        ]


def detect_multi_region(blocks, localizations, family: str = "") -> list[MultiRegionReport]:
    """Report an alignment with two or more blocks and which matures sit in each.

    Matures that are Inside or Near a block count as its occupants.
    """
    blocks = tuple(blocks)
    if len(blocks) < 2:
        return []
    occ = [[] for _ in blocks]
    for loc in localizations:
        if loc.relation is not Relation.OUTSIDE and loc.block_index is not None:
            occ[loc.block_index - 1].append(loc.mature_id)
    return [MultiRegionReport(family, blocks, tuple(tuple(o) for o in occ))]


def format_blocks(family: str, blocks: list[ConservedBlock], msa: Msa) -> str:
    lines = ["#family\tblock_index\tmsa_start\tmsa_end\tlength\tmean_score",
             "#row_id\tseq_start\tseq_end\tsubsequence"]
    for k, b in enumerate(blocks, start=1):
        lines.append(f"{family}\t{k}\t{b.start_col}\t{b.end_col}\t{b.length}\t{b.mean_score:.4f}")
        for rid in msa.ids:
            span = b.per_row_spans.get(rid)
            if span is None:
                lines.append(f"{rid}\t.\t.\t.")
            else:
                lines.append(f"{rid}\t{span[0]}\t{span[1]}\t{b.per_row_subsequences[rid]}")
    return "\n".join(lines) + "\n"


def format_localizations(locs) -> str:
    lines = ["#mature_id\tfamily\trelation\tblock_index\toffset"]
    for loc in locs:
        idx = "." if loc.block_index is None else str(loc.block_index)
        lines.append(f"{loc.mature_id}\t{loc.family}\t{loc.relation.value}\t{idx}\t{loc.offset}")
    return "\n".join(lines) + "\n"


def format_stats(stats: ConservationStats) -> str:
    return (
        "#inside_pct\tnear_pct\toutside_pct\tn\n"
        f"{stats.inside_pct:.1f}\t{stats.near_pct:.1f}\t{stats.outside_pct:.1f}\t{stats.n}\n"
    )


def format_anomalies(reports) -> str:
    lines = ["#family\tn_blocks\tblock_index\tmsa_start\tmsa_end\toccupants"]
    for rep in reports:
        for k, (b, occ) in enumerate(zip(rep.blocks, rep.occupants), start=1):
            who = ",".join(occ) if occ else "no mature occupant"
            lines.append(f"{rep.family}\t{len(rep.blocks)}\t{k}\t{b.start_col}\t{b.end_col}\t{who}")
    return "\n".join(lines) + "\n"
