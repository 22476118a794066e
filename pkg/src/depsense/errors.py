"""Exception types shared across the package."""


class DepsenseError(Exception):
    """Base class for all package errors."""


class DataFormatError(DepsenseError):
    """A file or stream does not conform to its expected format."""


class MissingVocabError(DepsenseError):
    """A lemma/POS pair is absent from its vector space."""

    def __init__(self, lemma, pos):
        super().__init__(f"out of vocabulary: {lemma}/{pos}")
        self.lemma = lemma
        self.pos = pos
