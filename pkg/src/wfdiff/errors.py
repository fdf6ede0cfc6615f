"""Exception hierarchy shared across the package."""


class WfdiffError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(WfdiffError):
    """A file or byte stream does not conform to its declared format."""


class ContractError(WfdiffError):
    """An operation was called in violation of its precondition."""


class ShapeError(WfdiffError):
    """Operands have incompatible shapes."""


class SizeError(WfdiffError):
    """An image is too small for the requested operation."""


class ParameterError(WfdiffError):
    """A scalar parameter is out of its valid range."""


class ValidationError(WfdiffError):
    """Data failed a semantic validity check (non-finite values, bad norms...)."""


class SymmetryError(WfdiffError):
    """A spectrum expected to be conjugate-symmetric is not."""


class NumericError(WfdiffError):
    """A numerical computation produced non-finite intermediates."""
