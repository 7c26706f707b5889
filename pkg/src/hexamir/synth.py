"""Deterministic synthetic genomes with planted (optionally mutated) motifs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .seqio import normalize, reverse_complement
from .search import Strand

_NEXT_BASE = {"A": "C", "C": "G", "G": "U", "U": "A", "N": "A"}


@dataclass(frozen=True)
class Plant:
    """A sequence written into the genome at 1-based `offset`.

    `mutations` are 1-based positions within `sequence` that are substituted
    (A->C->G->U->A) before planting.  A reverse-complement plant is written
    so that the genome's reverse strand reads the (mutated) sequence.
    """

    sequence: str
    offset: int
    strand: Strand = Strand.FORWARD
    mutations: tuple[int, ...] = ()

    def planted_sequence(self) -> str:
        seq = list(normalize(self.sequence))
        for m in self.mutations:
            if not 1 <= m <= len(seq):
                raise ValidationError(f"mutation position {m} outside plant of length {len(seq)}")
            seq[m - 1] = _NEXT_BASE[seq[m - 1]]
        s = "".join(seq)
        return s if self.strand is Strand.FORWARD else reverse_complement(s)

    @property
    def end(self) -> int:
        return self.offset + len(normalize(self.sequence)) - 1


def parse_plant(spec: str) -> Plant:
    """Parse ``SEQ:OFFSET[:STRAND[:POS,POS,...]]`` (strand ``+`` or ``-``)."""
    parts = spec.split(":")
    if not 2 <= len(parts) <= 4:
        raise ValidationError(f"bad plant spec {spec!r}")
    try:
        offset = int(parts[1])
        strand = Strand(parts[2]) if len(parts) > 2 and parts[2] else Strand.FORWARD
        muts = tuple(int(x) for x in parts[3].split(",") if x) if len(parts) > 3 else ()
    except ValueError:
        raise ValidationError(f"bad plant spec {spec!r}") from None
    return Plant(parts[0], offset, strand, muts)


def synthetic_genome(length: int, seed: int, plants=()) -> str:
    """Uniform random ``ACGU`` sequence of `length` with `plants` applied."""
    if length < 1:
        raise ValidationError("genome length must be >= 1")
    rng = np.random.default_rng(seed)
    genome = np.array(list("ACGU"))[rng.integers(0, 4, size=length)]
    spans = []
    for p in plants:
        if p.offset < 1 or p.end > length:
            raise ValidationError(f"plant at {p.offset}-{p.end} outside genome of length {length}")
        for lo, hi in spans:
            if p.offset <= hi and lo <= p.end:
                raise ValidationError(f"plant at {p.offset}-{p.end} overlaps plant at {lo}-{hi}")
        spans.append((p.offset, p.end))
        genome[p.offset - 1 : p.end] = list(p.planted_sequence())
    return "".join(genome)


def format_manifest(plants) -> str:
    lines = ["#offset\tend\tstrand\tmutations\tsequence\tplanted"]
    for p in plants:
        muts = ",".join(str(m) for m in p.mutations) or "."
        lines.append(
            f"{p.offset}\t{p.end}\t{p.strand.value}\t{muts}\t{normalize(p.sequence)}\t{p.planted_sequence()}"
        )
    return "\n".join(lines) + "\n"
