"""Guide-tree progressive multiple alignment.

Pairwise distances are ``1 - fractional identity`` of global alignments,
the guide tree is neighbor joining, and the alignment is built bottom-up
over the tree with profile-profile alignment ("once a gap, always a gap").
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .align import DEFAULT_SCHEME, Profile, ScoringScheme, fractional_identity, global_align, profile_align
from .exceptions import EmptyInput, InvalidResidue, ValidationError
from .seqio import SeqRecord, normalize


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple[str, ...]
    d: np.ndarray

    def __post_init__(self):
        d = self.d
        n = len(self.ids)
        if d.shape != (n, n):
            raise ValidationError("distance matrix shape does not match ids")
        if not np.allclose(d, d.T, atol=0) or np.any(np.diag(d) != 0):
            raise ValidationError("distance matrix must be symmetric with a zero diagonal")
        if np.any(d < 0) or np.any(d > 1):
            raise ValidationError("distances must lie in [0, 1]")

    def __getitem__(self, pair):
        a, b = pair
        return self.d[self.ids.index(a), self.ids.index(b)]


def distance_matrix(seqs: list[SeqRecord], scheme: ScoringScheme = DEFAULT_SCHEME, workers: int = 1) -> DistanceMatrix:
    if len(seqs) < 2:
        raise EmptyInput("need at least two sequences")
    pairs = list(combinations(range(len(seqs)), 2))

    def dist(ij):
        i, j = ij
        return 1.0 - fractional_identity(global_align(seqs[i].residues, seqs[j].residues, scheme))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(dist, pairs))
    else:
        values = [dist(p) for p in pairs]
    d = np.zeros((len(seqs), len(seqs)))
    for (i, j), v in zip(pairs, values):
        d[i, j] = d[j, i] = v
    return DistanceMatrix(tuple(s.id for s in seqs), d)


@dataclass
class TreeNode:
    name: str | None = None
    children: list["TreeNode"] = field(default_factory=list)
    length: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list[str]:
        out, stack = [], [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.name)
            else:
                stack.extend(reversed(node.children))
        return out

    def postorder(self):
        stack, out = [(self, False)], []
        while stack:
            node, seen = stack.pop()
            if seen or node.is_leaf:
                out.append(node)
            else:
                stack.append((node, True))
                stack.extend((c, False) for c in reversed(node.children))
        return out

    def to_newick(self, decimals: int = 6) -> str:
        return _newick(self, decimals) + ";"


def _quote(name: str) -> str:
    if any(c in name for c in " ,:;()[]'"):
        return "'" + name.replace("'", "''") + "'"
    return name


def _newick(node, decimals, is_root=True):
    # iterative rendering would be overkill; trees here are a few hundred deep at most
    if node.is_leaf:
        s = _quote(node.name)
    else:
        s = "(" + ",".join(_newick(c, decimals, False) for c in node.children) + ")"
    if not is_root:
        s += f":{node.length:.{decimals}f}"
    return s


GuideTree = TreeNode


def build_guide_tree(dm: DistanceMatrix) -> TreeNode:
    """Neighbor-joining tree.

    Pairs are chosen by the usual Q criterion with ties going to the
    smallest ``(i, j)``; negative branch lengths are clamped to 0.  The last
    two clusters hang from a root placed on the first of them, so that
    cluster's stem has length 0 and the other carries the full distance.
    """
    n = len(dm.ids)
    if n < 2:
        raise EmptyInput("need at least two taxa")
    d = dm.d.astype(float).copy()
    nodes = [TreeNode(name) for name in dm.ids]
    while len(nodes) > 2:
        k = len(nodes)
        r = d.sum(axis=1)
        q = (k - 2) * d - r[:, None] - r[None, :]
        q[np.tril_indices(k)] = np.inf
        i, j = np.unravel_index(int(np.argmin(q)), q.shape)
        li = 0.5 * d[i, j] + (r[i] - r[j]) / (2 * (k - 2))
        lj = d[i, j] - li
        nodes[i].length = max(0.0, li)
        nodes[j].length = max(0.0, lj)
        joined = TreeNode(children=[nodes[i], nodes[j]])
        new = 0.5 * (d[i] + d[j] - d[i, j])
        d[i, :] = new
        d[:, i] = new
        d[i, i] = 0.0
        d = np.delete(np.delete(d, j, axis=0), j, axis=1)
        nodes[i] = joined
        del nodes[j]
    a, b = nodes
    a.length = 0.0
    b.length = max(0.0, d[0, 1])
    return TreeNode(children=[a, b])


@dataclass(frozen=True)
class Msa:
    ids: tuple[str, ...]
    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.rows or len(self.ids) != len(self.rows):
            raise ValidationError("an alignment needs one row per id")
        if len({len(r) for r in self.rows}) != 1 or not self.rows[0]:
            raise ValidationError("alignment rows must be non-empty and of equal length")
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError("alignment row ids must be unique")
        for k in range(len(self.rows[0])):
            if all(r[k] == "-" for r in self.rows):
                raise ValidationError(f"column {k + 1} is all gaps")

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __len__(self):
        return len(self.rows)

    def row(self, row_id: str) -> str:
        return self.rows[self.ids.index(row_id)]

    def degapped(self, row_id: str) -> str:
        return self.row(row_id).replace("-", "")

    def residue_columns(self, row_id: str) -> list[int]:
        """1-based MSA column of each residue of the row, in sequence order."""
        return [k + 1 for k, c in enumerate(self.row(row_id)) if c != "-"]


def progressive_msa(seqs: list[SeqRecord], tree: TreeNode, scheme: ScoringScheme = DEFAULT_SCHEME) -> Msa:
    """Align `seqs` following the guide tree bottom-up; rows keep input order."""
    by_id = {s.id: s for s in seqs}
    if sorted(tree.leaves()) != sorted(by_id):
        raise ValidationError("guide tree leaves differ from sequence ids")
    profiles: dict[int, Profile] = {}
    for node in tree.postorder():
        if node.is_leaf:
            profiles[id(node)] = Profile.from_sequence(node.name, by_id[node.name].residues)
        else:
            left, right = (profiles.pop(id(c)) for c in node.children)
            profiles[id(node)] = profile_align(left, right, scheme).profile
    prof = profiles[id(tree)]
    row_of = dict(zip(prof.member_ids, prof.rows))
    ids = tuple(s.id for s in seqs)
    return Msa(ids, tuple(row_of[i] for i in ids))


def align_sequences(seqs: list[SeqRecord], scheme: ScoringScheme = DEFAULT_SCHEME, workers: int = 1):
    """Distance matrix, guide tree and MSA in one call."""
    dm = distance_matrix(seqs, scheme, workers)
    tree = build_guide_tree(dm)
    return progressive_msa(seqs, tree, scheme), tree, dm


@dataclass(frozen=True)
class Cluster:
    ids: tuple[str, ...]
    undersized: bool = False

    def __len__(self):
        return len(self.ids)


def extract_clusters(tree: TreeNode, min_size: int = 8, max_size: int = 27) -> list[Cluster]:
    """Cut the guide tree into clusters of at most `max_size` leaves.

    Descending from the root, the first subtree small enough becomes a
    cluster.  A whole child subtree smaller than `min_size` is merged into
    the smallest cluster of its sibling when the result still fits;
    otherwise it stays and is flagged undersized.
    """
    if not 1 <= min_size <= max_size:
        raise ValidationError("need 1 <= min_size <= max_size")
    size = {}
    for node in tree.postorder():
        size[id(node)] = 1 if node.is_leaf else sum(size[id(c)] for c in node.children)

    def absorb(small, others, small_first):
        if len(small) != 1 or len(small[0]) >= min_size or not others:
            return small, others, False
        k = min(range(len(others)), key=lambda t: len(others[t]))
        if len(small[0]) + len(others[k]) > max_size:
            return small, others, False
        merged = small[0] + others[k] if small_first else others[k] + small[0]
        return [], others[:k] + [merged] + others[k + 1 :], True

    def cut(node) -> list[list[str]]:
        if size[id(node)] <= max_size:
            return [node.leaves()]
        left, right = (cut(c) for c in node.children)
        left, right, merged = absorb(left, right, True)
        if merged:
            return right
        right, left, _ = absorb(right, left, False)
        return left + right

    return [Cluster(tuple(c), len(c) < min_size) for c in cut(tree)]


def format_aligned_fasta(msa: Msa, width: int = 60) -> str:
    buf = io.StringIO()
    for rid, row in zip(msa.ids, msa.rows):
        buf.write(f">{rid}\n")
        for i in range(0, len(row), width):
            buf.write(row[i : i + width] + "\n")
    return buf.getvalue()


def parse_aligned_fasta(text: str) -> Msa:
    """Read gapped FASTA (``-`` or ``.`` for gaps) into an :class:`Msa`."""
    ids, rows, cur = [], [], None
    for line in text.splitlines():
        if line.startswith(">"):
            ids.append(line[1:].split()[0] if line[1:].split() else "")
            cur = []
            rows.append(cur)
        elif cur is not None:
            cur.append(line.strip())
    out = []
    for rid, parts in zip(ids, rows):
        raw = "".join(parts).replace(".", "-")
        chunks = raw.split("-")
        try:
            body = "-".join(normalize(c) if c.strip() else "" for c in chunks)
        except InvalidResidue as e:
            raise ValidationError(f"row {rid!r}: {e}") from None
        out.append(body)
    if not ids:
        raise EmptyInput("no aligned sequences")
    return Msa(tuple(ids), tuple(out))


def format_clustal(msa: Msa, width: int = 60) -> str:
    """Clustal-style blocks: ``id  slice  cumulative-residues``, then a line
    marking fully identical columns with ``*``."""
    pad = max(len(i) for i in msa.ids) + 4
    counts = [0] * len(msa)
    lines = ["CLUSTAL multiple sequence alignment", "", ""]
    for start in range(0, msa.ncols, width):
        for k, (rid, row) in enumerate(zip(msa.ids, msa.rows)):
            chunk = row[start : start + width]
            counts[k] += sum(1 for c in chunk if c != "-")
            lines.append(f"{rid.ljust(pad)}{chunk} {counts[k]}")
        stars = "".join(
            "*" if len({r[c] for r in msa.rows}) == 1 and msa.rows[0][c] != "-" else " "
            for c in range(start, min(start + width, msa.ncols))
        )
        lines.append(" " * pad + stars.rstrip())
        lines.append("")
    return "\n".join(lines) + "\n"


def format_clusters(clusters: list[Cluster]) -> str:
    lines = ["#cluster_index\tsize\tflag\tids"]
    for k, c in enumerate(clusters, start=1):
        flag = "undersized" if c.undersized else "ok"
        lines.append(f"{k}\t{len(c)}\t{flag}\t{','.join(c.ids)}")
    return "\n".join(lines) + "\n"
