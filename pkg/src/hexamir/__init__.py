"""Homology search, progressive alignment and conservation analysis for miRNAs."""

__version__ = "0.1.0"

from .align import (
    DEFAULT_SCHEME,
    PairwiseAlignment,
    Profile,
    ScoringScheme,
    fractional_identity,
    global_align,
    local_align,
    profile_align,
)
from .conservation import (
    conservation_profile,
    conservation_stats,
    conserved_blocks,
    detect_multi_region,
    localize_mature,
)
from .msa import Msa, align_sequences, build_guide_tree, distance_matrix, extract_clusters, progressive_msa
from .search import (
    KmerIndex,
    MatchClass,
    SearchParams,
    Strand,
    build_index,
    calibrate,
    e_value,
    search,
    seed_hits,
)
from .seqio import Corpus, Kind, MatureAnnotation, SeqRecord, assemble_corpus, normalize, parse_annotations, parse_fasta
from .setops import mature_keys, pairwise_shared, venn
