"""Exception hierarchy shared by the lab modules.

Every error carries the process exit code the command line front end maps it
to: ``2`` for bad input, ``3`` for a resource limit. Law violations found by
verification are never raised; they are reported.
"""


class LabError(Exception):
    """Base class for all errors raised by :mod:`frobenius_lab`."""

    exit_code = 2


class NotAPartialOrder(LabError, ValueError):
    """The relation is not reflexive, antisymmetric and transitive."""


class NotALattice(LabError, ValueError):
    """Some pair of elements has no least upper or greatest lower bound."""


class InvalidParameter(LabError, ValueError):
    """A family parameter or configuration value is out of range."""


class ResourceLimit(LabError):
    """A configured cap on enumeration or search size was exceeded."""

    exit_code = 3


class TypeMismatch(LabError, TypeError):
    """Two maps cannot be composed because their lattices differ."""


class NoTranspose(LabError):
    """A map has no transpose with respect to the given pairings."""


class NotAssociative(LabError, ValueError):
    """A multiplication table or ternary relation is not associative."""


class NotSupDistributive(LabError, ValueError):
    """A multiplication does not distribute over (binary or empty) joins."""


class NotDualizing(LabError, ValueError):
    """The requested element is not dualizing in the quantale."""


class WitnessInvalid(LabError, ValueError):
    """A Frobenius witness fails verification where a valid one is required."""


class NotTight(LabError, ValueError):
    """A map is not a join of one-step maps."""


class NotAGroup(LabError, ValueError):
    """A multiplication table lacks an identity or inverses."""


class SchemaError(LabError, ValueError):
    """A serialized document does not match its schema.

    Attributes:
        path (str): JSON path of the offending field, e.g. ``$.covers[2]``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
