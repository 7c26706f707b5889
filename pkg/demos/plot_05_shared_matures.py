"""
Shared matures across species
=============================

Mature sequences are compared by sequence.  Exact matching gives plain set
intersections; a tolerance of one mismatch pairs near-identical matures
through a maximum bipartite matching.
"""

from hexamir.seqio import Kind, SeqRecord, assemble_corpus
from hexamir.setops import format_matrix, format_venn, venn

matures = {
    "dme": ["UGGAAUGUAAAGAAGUAUGGAG", "UAUCACAGCCAGCUUUGAUGAGC", "UCCCUGAGACCCUAACUUGUGA"],
    "aga": ["UGGAAUGUAAAGAAGUAUGGAG", "UAUCACAGCCAGCUUUGAUGAGA"],
    "bmo": ["UGGAAUGUAAAGAAGUAUGGAG", "UCCCUGAGACCCUAACUUGUGA", "UGAGAUCAUUUUGAAAGCUGAU"],
}
records = [
    SeqRecord(f"{sp}-miR-{k}", sp, Kind.MATURE, seq)
    for sp, seqs in matures.items()
    for k, seq in enumerate(seqs, start=1)
]
corpus = assemble_corpus(records)

for tolerance in (0, 1):
    report = venn(corpus, ["dme", "aga", "bmo"], tolerance)
    print(format_matrix(report))
    print(format_venn(report))
