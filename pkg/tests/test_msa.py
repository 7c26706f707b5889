from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexamir.datasets import MIR276_REGION2, mir276
from hexamir.exceptions import EmptyInput, ValidationError
from hexamir.msa import (
    DistanceMatrix,
    Msa,
    TreeNode,
    align_sequences,
    build_guide_tree,
    distance_matrix,
    extract_clusters,
    format_aligned_fasta,
    format_clustal,
    format_clusters,
    parse_aligned_fasta,
    progressive_msa,
)
from hexamir.seqio import Kind, SeqRecord

from oracles import brute_best_global


def rec(rid, seq):
    return SeqRecord(rid, rid.split("-")[0], Kind.PRECURSOR, seq)


def patristic(tree):
    """Leaf-to-leaf path lengths of a tree."""
    dist = {}

    def walk(node):
        if node.is_leaf:
            return {node.name: 0.0}
        below = [walk(c) for c in node.children]
        for child, b in zip(node.children, below):
            for leaf in b:
                b[leaf] += child.length
        for b1, b2 in combinations(below, 2):
            for x, dx in b1.items():
                for y, dy in b2.items():
                    dist[frozenset((x, y))] = dx + dy
        merged = {}
        for b in below:
            merged.update(b)
        return merged

    walk(tree)
    return dist


def unrooted_edges(tree):
    """Edge lengths with the two root edges merged into one."""
    below = [n.length for n in tree.postorder() if n is not tree and all(n is not c for c in tree.children)]
    return below + [sum(c.length for c in tree.children)]


def splits(tree):
    leaves = frozenset(tree.leaves())
    out = set()
    for node in tree.postorder():
        s = frozenset(node.leaves())
        if 1 < len(s) < len(leaves) - 1:
            out.add(min(s, leaves - s, key=sorted))
    return out


# ---- distances --------------------------------------------------------------

def test_distances():
    seqs = [rec("a-1", "ACGUACGU"), rec("b-1", "ACGUACGU"), rec("c-1", "ACGAACGU"), rec("d-1", "GGGGGGGG")]
    dm = distance_matrix(seqs)
    assert dm["a-1", "b-1"] == 0.0
    assert dm["a-1", "c-1"] == 0.125
    # the only optimal alignment of ACGUACGU and GGGGGGGG is ungapped, 2 of 8 identical
    score, optimal = brute_best_global("ACGUACGU", "GGGGGGGG", 5, -4, 10, 1)
    assert optimal == [("ACGUACGU", "GGGGGGGG")]
    assert dm["a-1", "d-1"] == 0.75
    with pytest.raises(EmptyInput):
        distance_matrix(seqs[:1])


def test_distance_matrix_validation():
    with pytest.raises(ValidationError):
        DistanceMatrix(("a", "b"), np.array([[0, 0.2], [0.3, 0]]))
    with pytest.raises(ValidationError):
        DistanceMatrix(("a", "b"), np.array([[0, 1.2], [1.2, 0]]))


# ---- neighbor joining ------------------------------------------------------

def test_nj_three_taxa():
    d = np.array([[0, 0.2, 0.3], [0.2, 0, 0.3], [0.3, 0.3, 0]])
    tree = build_guide_tree(DistanceMatrix(("a", "b", "c"), d))
    assert sorted(unrooted_edges(tree)) == pytest.approx([0.1, 0.1, 0.2], abs=1e-9)
    assert tree.to_newick() == "((a:0.100000,b:0.100000):0.000000,c:0.200000);"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.001, 0.2), min_size=5, max_size=5), st.permutations(list("abcd")))
def test_nj_four_taxa_additive(lengths, order):
    la, lb, lc, ld, inner = lengths
    stem = dict(zip(order, (la, lb, lc, ld)))
    side = {order[0]: 0, order[1]: 0, order[2]: 1, order[3]: 1}
    ids = tuple("abcd")
    d = np.zeros((4, 4))
    for i, j in combinations(range(4), 2):
        x, y = ids[i], ids[j]
        v = stem[x] + stem[y] + (inner if side[x] != side[y] else 0.0)
        d[i, j] = d[j, i] = v
    tree = build_guide_tree(DistanceMatrix(ids, d))
    assert splits(tree) == {min(frozenset(order[:2]), frozenset(order[2:]), key=sorted)}
    pd = patristic(tree)
    for i, j in combinations(range(4), 2):
        assert abs(pd[frozenset((ids[i], ids[j]))] - d[i, j]) < 1e-9
    got = sorted(unrooted_edges(tree))
    assert np.allclose(got, sorted(lengths), atol=1e-9, rtol=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_nj_branch_lengths_nonnegative(n, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(0, 1, (n, n))
    d = np.triu(d, 1)
    d = d + d.T
    tree = build_guide_tree(DistanceMatrix(tuple(f"t{i}" for i in range(n)), d))
    assert sorted(tree.leaves()) == sorted(f"t{i}" for i in range(n))
    assert all(node.length >= 0 for node in tree.postorder())


# ---- progressive alignment -------------------------------------------------

def test_msa_with_a_deletion():
    seqs = [rec("x-1", "ACGU"), rec("x-2", "ACGU"), rec("x-3", "AGU")]
    msa, _, _ = align_sequences(seqs)
    assert msa.rows == ("ACGU", "ACGU", "A-GU")


def test_msa_identical_sequences_have_no_gaps():
    seqs = [rec(f"s-{k}", "GGAUCCAUGCAUGA") for k in range(5)]
    msa, _, _ = align_sequences(seqs)
    assert all("-" not in r for r in msa.rows)


def test_msa_mir276_region2_is_shared():
    recs, _ = mir276()
    msa, tree, _ = align_sequences(recs)
    col = msa.rows[0].find(MIR276_REGION2)
    assert col >= 0
    assert all(r[col : col + len(MIR276_REGION2)] == MIR276_REGION2 for r in msa.rows)
    assert tree.to_newick() == (
        "((aga-mir-276:0.182099,ame-mir-276:0.096251):0.000000,bmo-mir-276:0.099151);"
    )


def test_progressive_rejects_mismatched_tree():
    seqs = [rec("a-1", "ACGU"), rec("b-1", "ACGU")]
    tree = TreeNode(children=[TreeNode("a-1"), TreeNode("c-1")])
    with pytest.raises(ValidationError):
        progressive_msa(seqs, tree)


seq_lists = st.lists(st.text("ACGU", min_size=5, max_size=30), min_size=2, max_size=7)


@settings(max_examples=60, deadline=None)
@given(seq_lists)
def test_msa_rows_degap_to_inputs(seqs):
    recs = [rec(f"r-{k}", s) for k, s in enumerate(seqs)]
    msa, _, _ = align_sequences(recs)
    assert [r.replace("-", "") for r in msa.rows] == seqs
    assert len({len(r) for r in msa.rows}) == 1
    for k in range(msa.ncols):
        assert any(r[k] != "-" for r in msa.rows)


def test_msa_validation():
    with pytest.raises(ValidationError):
        Msa(("a", "b"), ("AC", "A"))
    with pytest.raises(ValidationError):
        Msa(("a", "b"), ("A-", "A-"))
    with pytest.raises(ValidationError):
        Msa(("a", "a"), ("A", "A"))


# ---- clusters --------------------------------------------------------------

def balanced(names):
    if len(names) == 1:
        return TreeNode(names[0])
    h = len(names) // 2
    return TreeNode(children=[balanced(names[:h]), balanced(names[h:])])


def caterpillar(names):
    node = TreeNode(names[0])
    for n in names[1:]:
        node = TreeNode(children=[node, TreeNode(n)])
    return node


def test_small_tree_is_one_cluster():
    names = [f"l{i}" for i in range(8)]
    (c,) = extract_clusters(balanced(names))
    assert c.ids == tuple(names) and not c.undersized


def test_balanced_tree_splits_in_half():
    names = [f"l{i}" for i in range(32)]
    assert [len(c) for c in extract_clusters(balanced(names))] == [16, 16]


def test_caterpillar_is_partitioned():
    names = [f"l{i}" for i in range(30)]
    clusters = extract_clusters(caterpillar(names))
    assert sorted(i for c in clusters for i in c.ids) == sorted(names)
    assert all(len(c) <= 27 for c in clusters)
    assert all(8 <= len(c) for c in clusters if not c.undersized)
    assert all(len(c) < 8 for c in clusters if c.undersized)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 120), st.integers(0, 2**32 - 1))
def test_clusters_partition_random_trees(n, seed):
    rng = np.random.default_rng(seed)
    nodes = [TreeNode(f"t{i}") for i in range(n)]
    while len(nodes) > 1:
        i, j = sorted(rng.choice(len(nodes), 2, replace=False))
        b = nodes.pop(j)
        a = nodes.pop(i)
        nodes.append(TreeNode(children=[a, b]))
    clusters = extract_clusters(nodes[0])
    ids = [i for c in clusters for i in c.ids]
    assert sorted(ids) == sorted(f"t{i}" for i in range(n))
    for c in clusters:
        assert len(c) <= 27
        assert c.undersized == (len(c) < 8)


# ---- formats and determinism -----------------------------------------------

def test_aligned_fasta_roundtrip():
    msa = Msa(("a", "b"), ("AC-GU", "ACUGU"))
    assert parse_aligned_fasta(format_aligned_fasta(msa)) == msa
    assert parse_aligned_fasta(">a\nac.gt\n>b\nACUGU\n") == msa


def test_clustal_layout():
    msa = Msa(("a", "bb"), ("AC-GU", "ACUGU"))
    lines = format_clustal(msa).splitlines()
    assert lines[0].startswith("CLUSTAL")
    assert lines[3] == "a     AC-GU 4"
    assert lines[4] == "bb    ACUGU 5"
    assert lines[5] == "      ** **"


def test_format_clusters():
    out = format_clusters(extract_clusters(balanced(["a", "b", "c"])))
    assert out.splitlines()[1] == "1\t3\tundersized\ta,b,c"


def test_workers_are_byte_identical():
    rng = np.random.default_rng(5)
    recs = [rec(f"r-{k}", "".join(rng.choice(list("ACGU"), rng.integers(50, 121)))) for k in range(12)]
    outs = []
    for w in (1, 4):
        msa, tree, _ = align_sequences(recs, workers=w)
        outs.append(format_aligned_fasta(msa) + tree.to_newick())
    assert outs[0] == outs[1]
