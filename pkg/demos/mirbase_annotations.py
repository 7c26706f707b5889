"""
Mature coordinates from a miRBase ``miRNA.dat`` file
====================================================

Writes the four-column annotation table used by ``hexamir search`` and
``hexamir conserve`` (precursor id, mature id, start, end).

    python demos/mirbase_annotations.py miRNA.dat > hairpin_mature.tsv
"""

import re
import sys

from hexamir.seqio import MatureAnnotation, format_annotations

LOCATION = re.compile(r"^FT   miRNA\s+(\d+)\.\.(\d+)")
PRODUCT = re.compile(r'/product="([^"]+)"')


def parse_dat(lines):
    precursor, span = None, None
    for line in lines:
        if line.startswith("ID   "):
            precursor = line.split()[1]
        elif m := LOCATION.match(line):
            span = int(m.group(1)), int(m.group(2))
        elif span and (m := PRODUCT.search(line)):
            yield MatureAnnotation(precursor, m.group(1), *span)
            span = None


if __name__ == "__main__":
    with open(sys.argv[1]) as fh:
        sys.stdout.write(format_annotations(parse_dat(fh)))
