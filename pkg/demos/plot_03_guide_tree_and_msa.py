"""
Guide trees and progressive alignment
=====================================

The three mir-276 precursors are aligned by building a neighbor-joining
tree from pairwise identities and merging profiles up the tree.
"""

import numpy as np

from hexamir.datasets import mir276
from hexamir.msa import DistanceMatrix, align_sequences, build_guide_tree, extract_clusters, format_clustal

records, _ = mir276()
msa, tree, dm = align_sequences(records)

print(np.round(dm.d, 3))
print(tree.to_newick())
print(format_clustal(msa))

# an additive distance matrix gives back the tree it came from
d = np.array([[0.0, 0.17, 0.32, 0.15],
              [0.17, 0.0, 0.39, 0.22],
              [0.32, 0.39, 0.0, 0.23],
              [0.15, 0.22, 0.23, 0.0]])
print(build_guide_tree(DistanceMatrix(("a", "b", "c", "d"), d)).to_newick())

# small families end up as a single, undersized cluster
print(extract_clusters(tree))
