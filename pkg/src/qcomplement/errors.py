class DomainError(ValueError):
    """A parameter lies outside the range where a machine or formula is defined."""


class UnsupportedSizeError(ValueError):
    """The register is larger (or smaller) than the construction supports."""
