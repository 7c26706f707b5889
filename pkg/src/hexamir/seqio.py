"""Sequence ingestion: FASTA records, mature-coordinate annotations, corpora.

All sequences are held in a normalized RNA alphabet ``ACGUN``.  DNA input is
accepted and converted (``T`` becomes ``U``), case is folded, and whitespace
and digits (as found in pasted alignment blocks) are dropped.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import IO, Iterable, Mapping

from .exceptions import (
    AnnotationOutOfRange,
    DanglingAnnotation,
    DuplicateId,
    EmptyRecord,
    EmptySequence,
    InvalidResidue,
    MalformedLine,
    NonPositiveCoordinate,
    RecordTooLarge,
)

ALPHABET = "ACGUN"
MAX_RECORD_LENGTH = 2**31 - 1
MATURE_MIN_LENGTH = 16
MATURE_MAX_LENGTH = 30

_COMPLEMENT = str.maketrans("ACGUN", "UGCAN")
_SKIP = set(" \t\r\n\v\f0123456789")


class Kind(enum.Enum):
    PRECURSOR = "precursor"
    MATURE = "mature"
    GENOME = "genome"


def normalize(raw: str) -> str:
    """Return `raw` as an uppercase RNA string over ``ACGUN``.

    Parameters
    ----------
    raw : str
        Sequence text in any case, DNA or RNA alphabet.  Whitespace and
        digits are ignored.

    Returns
    -------
    str
        The normalized residues.

    Raises
    ------
    InvalidResidue
        For any other symbol; ``position`` is 1-based within `raw`.
    EmptySequence
        If nothing remains after stripping whitespace and digits.

    Examples
    --------
    >>> normalize("tgaggtagtaggttgtatagt")
    'UGAGGUAGUAGGUUGUAUAGU'
    """
    out = []
    for pos, ch in enumerate(raw, start=1):
        if ch in _SKIP:
            continue
        up = ch.upper()
        if up == "T":
            up = "U"
        if up not in ALPHABET:
            raise InvalidResidue(pos, ch)
        out.append(up)
    if not out:
        raise EmptySequence("sequence is empty after normalization")
    if len(out) > MAX_RECORD_LENGTH:
        raise RecordTooLarge(f"sequence of {len(out)} residues exceeds {MAX_RECORD_LENGTH}")
    return "".join(out)


def reverse_complement(seq: str) -> str:
    return seq.translate(_COMPLEMENT)[::-1]


def species_from_id(record_id: str) -> str:
    """miRBase-style species prefix (``"bmo-mir-276"`` -> ``"bmo"``)."""
    head, sep, _ = record_id.partition("-")
    return head if sep else ""


@dataclass(frozen=True)
class SeqRecord:
    id: str
    species: str
    kind: Kind
    residues: str
    description: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.residues:
            raise EmptyRecord(self.id)
        bad = next((i for i, c in enumerate(self.residues) if c not in ALPHABET), None)
        if bad is not None:
            raise InvalidResidue(bad + 1, self.residues[bad])

    def __len__(self):
        return len(self.residues)


@dataclass(frozen=True)
class MatureAnnotation:
    """1-based inclusive coordinates of a mature miRNA within its precursor."""

    precursor_id: str
    mature_id: str
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


def _as_text(data) -> str:
    if data is None:
        return ""
    if isinstance(data, bytes):
        return data.decode("utf-8")
    if isinstance(data, str):
        return data
    content = data.read()
    return content.decode("utf-8") if isinstance(content, bytes) else content


def parse_fasta(
    data: bytes | str | IO,
    species: str | None = None,
    kind: Kind = Kind.PRECURSOR,
) -> list[SeqRecord]:
    """Parse FASTA text into normalized records.

    The record id is the first whitespace-delimited token of the header; the
    rest of the header becomes the description.  Species comes from the id
    prefix unless `species` is given.
    """
    records: list[SeqRecord] = []
    seen: set[str] = set()
    header = None
    body: list[str] = []

    def flush():
        if header is None:
            return
        rid, _, desc = header.partition(" ")
        if not rid:
            raise MalformedLine(0, "FASTA header without an id")
        if rid in seen:
            raise DuplicateId(rid)
        raw = "".join(body)
        if not raw.strip():
            raise EmptyRecord(rid)
        seen.add(rid)
        sp = species if species is not None else species_from_id(rid)
        records.append(SeqRecord(rid, sp, kind, normalize(raw), desc.strip()))

    for line in _as_text(data).splitlines():
        if line.startswith(">"):
            flush()
            header = line[1:].strip().replace("\t", " ")
            body = []
        elif header is not None:
            body.append(line)
        elif line.strip():
            raise MalformedLine(0, "sequence data before the first FASTA header")
    flush()
    return records


def read_fasta(path, species=None, kind=Kind.PRECURSOR) -> list[SeqRecord]:
    with open(path, "rb") as fh:
        return parse_fasta(fh, species=species, kind=kind)


def format_fasta(records: Iterable[SeqRecord], width: int = 60) -> str:
    buf = io.StringIO()
    for rec in records:
        buf.write(f">{rec.id}")
        if rec.description:
            buf.write(f" {rec.description}")
        buf.write("\n")
        seq = rec.residues
        for i in range(0, len(seq), width):
            buf.write(seq[i : i + width] + "\n")
    return buf.getvalue()


def parse_annotations(data: bytes | str | IO) -> list[MatureAnnotation]:
    """Parse the ``precursor_id  mature_id  start  end`` sidecar TSV."""
    out = []
    for line_no, line in enumerate(_as_text(data).splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 4 or not fields[0] or not fields[1]:
            raise MalformedLine(line_no)
        try:
            start, end = int(fields[2]), int(fields[3])
        except ValueError:
            raise MalformedLine(line_no, "start/end must be integers") from None
        if start < 1 or end < 1:
            raise NonPositiveCoordinate(line_no)
        out.append(MatureAnnotation(fields[0], fields[1], start, end))
    return out


def read_annotations(path) -> list[MatureAnnotation]:
    with open(path, "rb") as fh:
        return parse_annotations(fh)


def format_annotations(annotations: Iterable[MatureAnnotation]) -> str:
    return "".join(
        f"{a.precursor_id}\t{a.mature_id}\t{a.start}\t{a.end}\n" for a in annotations
    )


@dataclass(frozen=True)
class Corpus:
    """Immutable, validated collection of records and mature annotations.

    Build one with :func:`assemble_corpus`.
    """

    records: Mapping[str, SeqRecord]
    annotations: tuple[MatureAnnotation, ...]
    species_index: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, record_id) -> SeqRecord:
        return self.records[record_id]

    @property
    def species(self) -> list[str]:
        return list(self.species_index)

    def by_species(self, species: str, kind: Kind | None = None) -> list[SeqRecord]:
        recs = (self.records[i] for i in self.species_index.get(species, ()))
        return [r for r in recs if kind is None or r.kind is kind]

    def annotations_for(self, precursor_id: str) -> list[MatureAnnotation]:
        return [a for a in self.annotations if a.precursor_id == precursor_id]

    def mature_sequence(self, ann: MatureAnnotation) -> str:
        return self.records[ann.precursor_id].residues[ann.start - 1 : ann.end]


def assemble_corpus(
    records: Iterable[SeqRecord], annotations: Iterable[MatureAnnotation] = ()
) -> Corpus:
    recs: dict[str, SeqRecord] = {}
    index: dict[str, list[str]] = {}
    for rec in records:
        if rec.id in recs:
            raise DuplicateId(rec.id)
        recs[rec.id] = rec
        index.setdefault(rec.species, []).append(rec.id)

    anns = tuple(annotations)
    for a in anns:
        pre = recs.get(a.precursor_id)
        if pre is None or pre.kind is not Kind.PRECURSOR:
            raise DanglingAnnotation(a.precursor_id)
        if not 1 <= a.start <= a.end <= len(pre):
            raise AnnotationOutOfRange(
                a.mature_id, f"[{a.start}, {a.end}] vs precursor length {len(pre)}"
            )
        if not MATURE_MIN_LENGTH <= a.length <= MATURE_MAX_LENGTH:
            raise AnnotationOutOfRange(
                a.mature_id,
                f"length {a.length} outside [{MATURE_MIN_LENGTH}, {MATURE_MAX_LENGTH}]",
            )
    return Corpus(
        MappingProxyType(recs),
        anns,
        MappingProxyType({k: tuple(v) for k, v in index.items()}),
    )
