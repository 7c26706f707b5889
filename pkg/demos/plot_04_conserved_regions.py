"""
Conserved blocks in the mir-276 family
======================================

Column scores are majority-residue frequencies.  Runs of gap-free columns
that clear the threshold form blocks, and each annotated mature sequence
is placed Inside, Near or Outside a block.  mir-276 is unusual: it has two
blocks, and the honeybee and silkworm matures sit in different ones.
"""

from hexamir.conservation import (
    conservation_profile,
    conservation_stats,
    conserved_blocks,
    detect_multi_region,
    format_anomalies,
    localize_mature,
)
from hexamir.datasets import mir276
from hexamir.msa import align_sequences

records, annotations = mir276()
msa, _, _ = align_sequences(records)
profile = conservation_profile(msa)

# one character per column: '#' fully conserved, '+' two of three, '.' less
print("".join("#" if s == 1 else "+" if s >= 0.66 else "." for s in profile.scores))
for row_id, row in zip(msa.ids, msa.rows):
    print(row, row_id)

blocks = conserved_blocks(profile, msa=msa)
for k, b in enumerate(blocks, start=1):
    print(f"block {k}: columns {b.start_col}-{b.end_col}", set(b.per_row_subsequences.values()))

locs = [localize_mature(msa, blocks, a, "mir-276") for a in annotations]
for loc in locs:
    print(loc.mature_id, loc.relation.value, loc.block_index)

print(conservation_stats(locs))
print(format_anomalies(detect_multi_region(blocks, locs, "mir-276")))
