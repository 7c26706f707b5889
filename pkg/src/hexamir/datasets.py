"""Small bundled fixtures reconstructed from published examples."""

from importlib import resources

from .seqio import Kind, parse_annotations, parse_fasta

# The two conserved regions printed for the mir-276 family.
MIR276_REGION1 = "CCAUCAGCGAGGUAUAGAGUCCUACG"
MIR276_REGION2 = "GUAGGAACUUCAUACCGUGCUCUUGG"
# First column of region 1 in the published three-row alignment.
MIR276_REGION1_COLUMNS = (12, 37)

LET7 = "UGAGGUAGUAGGUUGUAUAGU"
LET7_SUBJECT_START = 75213


def _read(name):
    return resources.files(__package__).joinpath("data").joinpath(name).read_bytes()


def data_path(name):
    return resources.files(__package__).joinpath("data").joinpath(name)


def mir276():
    """The aga/ame/bmo mir-276 precursors and their annotated matures."""
    return parse_fasta(_read("mir276.fa"), kind=Kind.PRECURSOR), parse_annotations(_read("mir276_mature.tsv"))


def let7():
    return parse_fasta(_read("let7.fa"), kind=Kind.PRECURSOR), parse_annotations(_read("let7_mature.tsv"))
