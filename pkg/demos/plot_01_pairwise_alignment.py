"""
Pairwise alignment with affine gaps
===================================

Global and local alignment share one dynamic-programming kernel.  Here we
align a few short RNAs and look at how the gap penalty shapes the result.
"""

from hexamir.align import ScoringScheme, fractional_identity, global_align, local_align

# the default scheme: +5 match, -4 mismatch, gap of length L costs 10 + L
al = global_align("GGUGAUCCA", "GCUGAUCA")
print(al.aligned_a)
print(al.aligned_b)
print("score", al.score, "identity", round(fractional_identity(al), 3))

# a cheaper gap open lets the aligner split the gap
cheap = ScoringScheme(5, -4, 2, 1)
print(global_align("GGUGAUCCA", "GCUGAUCA", cheap))

# local alignment finds the mature let-7 inside a longer sequence
let7 = "UGAGGUAGUAGGUUGUAUAGU"
host = "CCGAUUACG" + let7 + "GCAUUAGC"
hit = local_align(let7, host)
print("local hit at", hit.b_start, "-", hit.b_end, "score", hit.score)

# nothing scores above zero, so the local alignment is empty
print(local_align("AAAA", "CCCC"))
