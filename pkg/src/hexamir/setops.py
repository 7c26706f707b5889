"""Shared mature miRNAs across species: pairwise counts and Venn regions.

Matures are compared as sequences, never by name.  With ``tolerance=k``
two matures match when they have equal length and differ at no more than
``k`` positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_bipartite_matching

from .exceptions import UnknownSpecies, ValidationError
from .seqio import Corpus, Kind


def mature_keys(corpus: Corpus, species: str, tolerance: int = 0) -> frozenset[str]:
    """Distinct mature sequences of `species`.

    Both mature records and annotated slices of the species' precursors
    contribute.  `tolerance` is only validated here: keys are plain strings
    and near matches are resolved when two key sets are compared.
    """
    if tolerance < 0:
        raise ValidationError("tolerance must be >= 0")
    if species not in corpus.species_index:
        raise UnknownSpecies(species)
    keys = {r.residues for r in corpus.by_species(species, Kind.MATURE)}
    for a in corpus.annotations:
        if corpus[a.precursor_id].species == species:
            keys.add(corpus.mature_sequence(a))
    return frozenset(keys)


def _hamming_edges(left: list[str], right: list[str], tolerance: int):
    """(i, j) index pairs of equal-length strings within `tolerance` mismatches."""
    rows, cols = [], []
    by_len: dict[int, list[int]] = {}
    for j, s in enumerate(right):
        by_len.setdefault(len(s), []).append(j)
    for length in {len(s) for s in left} & set(by_len):
        li = [i for i, s in enumerate(left) if len(s) == length]
        rj = by_len[length]
        A = np.frombuffer("".join(left[i] for i in li).encode(), dtype=np.uint8).reshape(len(li), length)
        B = np.frombuffer("".join(right[j] for j in rj).encode(), dtype=np.uint8).reshape(len(rj), length)
        dist = (A[:, None, :] != B[None, :, :]).sum(axis=2)
        ii, jj = np.nonzero(dist <= tolerance)
        rows.extend(li[i] for i in ii)
        cols.extend(rj[j] for j in jj)
    return rows, cols


def pairwise_shared(a, b, tolerance: int = 0) -> int:
    """Number of matures shared by two key sets.

    Exact intersection at tolerance 0; otherwise the size of a maximum
    matching, so no key is counted twice.
    """
    if tolerance < 0:
        raise ValidationError("tolerance must be >= 0")
    if tolerance == 0:
        return len(set(a) & set(b))
    left, right = sorted(a), sorted(b)
    if not left or not right:
        return 0
    rows, cols = _hamming_edges(left, right, tolerance)
    if not rows:
        return 0
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(left), len(right)))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match >= 0).sum())


@dataclass(frozen=True)
class IntersectionReport:
    species: tuple[str, ...]
    region_counts: dict[tuple[str, ...], int]  # exclusive membership, canonical order
    tolerance: int = 0

    @property
    def union_size(self) -> int:
        return sum(self.region_counts.values())

    def shared(self, a: str, b: str) -> int:
        if a == b:
            raise ValidationError("the diagonal of the pairwise matrix is undefined")
        return sum(c for s, c in self.region_counts.items() if a in s and b in s)

    @property
    def pairwise_matrix(self) -> np.ndarray:
        """Shared counts; the diagonal is -1 (printed as ``X``)."""
        n = len(self.species)
        m = np.full((n, n), -1, dtype=int)
        for i, j in combinations(range(n), 2):
            m[i, j] = m[j, i] = self.shared(self.species[i], self.species[j])
        return m


def subsets_in_order(species) -> list[tuple[str, ...]]:
    return [s for k in range(1, len(species) + 1) for s in combinations(species, k)]


def venn(corpus: Corpus, species, tolerance: int = 0) -> IntersectionReport:
    """Count matures present in exactly each subset of 2-4 species.

    At tolerance k > 0 matures are first grouped into connected components
    of the within-k graph; a component belongs to every species with a
    member in it.
    """
    species = tuple(species)
    if not 2 <= len(species) <= 4:
        raise ValidationError("venn needs 2 to 4 species")
    if len(set(species)) != len(species):
        raise ValidationError("species codes must be distinct")
    if tolerance < 0:
        raise ValidationError("tolerance must be >= 0")
    keysets = {s: mature_keys(corpus, s, tolerance) for s in species}
    universe = sorted(set().union(*keysets.values()))
    if tolerance == 0 or not universe:
        labels = np.arange(len(universe))
    else:
        rows, cols = _hamming_edges(universe, universe, tolerance)
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(universe),) * 2)
        _, labels = connected_components(graph, directed=False)
    members: dict[int, set[str]] = {}
    for key, lab in zip(universe, labels):
        members.setdefault(int(lab), set()).update(s for s in species if key in keysets[s])
    counts = {s: 0 for s in subsets_in_order(species)}
    for owners in members.values():
        counts[tuple(s for s in species if s in owners)] += 1
    return IntersectionReport(species, counts, tolerance)


def format_matrix(report: IntersectionReport) -> str:
    m = report.pairwise_matrix
    lines = [f"# tolerance={report.tolerance}", "species\t" + "\t".join(report.species)]
    for i, s in enumerate(report.species):
        cells = ["X" if i == j else str(m[i, j]) for j in range(len(report.species))]
        lines.append(s + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def format_venn(report: IntersectionReport) -> str:
    lines = [f"# tolerance={report.tolerance}", "#subset\tcount"]
    for subset, count in report.region_counts.items():
        lines.append(f"{'+'.join(subset)}\t{count}")
    return "\n".join(lines) + "\n"
