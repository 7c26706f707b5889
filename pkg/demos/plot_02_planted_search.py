"""
Finding a planted miRNA in a synthetic genome
=============================================

We plant the let-7 mature sequence into a random 100 kb genome, then run
the seed-and-extend search and look at the hit table and the tally.
"""

from hexamir.datasets import LET7, let7
from hexamir.search import SearchParams, format_hits, format_tally, search
from hexamir.seqio import Kind, SeqRecord
from hexamir.synth import Plant, synthetic_genome

queries, annotations = let7()
params = SearchParams(word_size=7, e_cutoff=10)

# an exact copy at 75213, then the same plant with growing damage
for mutations in [(), (11,), (5, 15), (4, 8, 12, 16, 20)]:
    genome = synthetic_genome(100_000, seed=42, plants=[Plant(LET7, 75213, mutations=mutations)])
    subject = SeqRecord("synthetic", "", Kind.GENOME, genome)
    report = search(queries, subject, params, annotations=annotations)
    print("mutations", mutations or "none")
    print(format_hits([report], params))

# the tally always sums to the number of queries
print(format_tally([report], params))
