"""Exception hierarchy.

Everything raised for bad input derives from :class:`ValidationError`, which
the command-line front end maps to exit status 3.
"""


class ValidationError(ValueError):
    """Base class for input and contract violations."""


class InvalidResidue(ValidationError):
    def __init__(self, position, symbol):
        self.position = position
        self.symbol = symbol
        super().__init__(f"invalid residue {symbol!r} at position {position}")


class EmptySequence(ValidationError):
    pass


class RecordTooLarge(ValidationError):
    pass


class EmptyRecord(ValidationError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"record {record_id!r} has no sequence")


class DuplicateId(ValidationError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"duplicate record id {record_id!r}")


class MalformedLine(ValidationError):
    def __init__(self, line_no, reason="expected 4 tab-separated fields"):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class NonPositiveCoordinate(ValidationError):
    def __init__(self, line_no):
        self.line_no = line_no
        super().__init__(f"line {line_no}: coordinates are 1-based and must be >= 1")


class DanglingAnnotation(ValidationError):
    def __init__(self, precursor_id):
        self.precursor_id = precursor_id
        super().__init__(f"annotation refers to unknown precursor {precursor_id!r}")


class AnnotationOutOfRange(ValidationError):
    def __init__(self, mature_id, detail=""):
        self.mature_id = mature_id
        msg = f"mature {mature_id!r} lies outside its precursor"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class EmptyAlignment(ValidationError):
    pass


class SubjectTooShort(ValidationError):
    pass


class NonNegativeExpectedScore(ValidationError):
    pass


class AnnotationRowMissing(ValidationError):
    def __init__(self, precursor_id):
        self.precursor_id = precursor_id
        super().__init__(f"precursor {precursor_id!r} is not a row of the alignment")


class EmptyInput(ValidationError):
    pass


class UnknownSpecies(ValidationError):
    def __init__(self, species):
        self.species = species
        super().__init__(f"unknown species code {species!r}")
