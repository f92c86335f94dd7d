'''
Exception hierarchy. Every error raised on purpose by the package derives
from ``LogicalTensorError``, itself a ``ValueError``.
'''
from typing import Any, Optional, Sequence


class LogicalTensorError(ValueError):
    '''Base class of the package errors.'''


class SpecFileError(LogicalTensorError):
    '''An input file or environment value cannot be parsed.'''


class WellNamednessViolation(LogicalTensorError):
    '''Two systems of one graph sit on the same vertex with different states.'''


class IncompatibleUnion(LogicalTensorError):
    '''A vertex carries different states in the two operands of a union.'''


class UniverseTooLarge(LogicalTensorError):
    '''The enumerated basis would exceed the configured cap.'''


class SubsetViolation(LogicalTensorError):
    '''A selector returned systems that are not part of its argument.'''


class InternalContractViolation(LogicalTensorError):
    '''A result that must hold by construction did not.'''


class NotNormalized(LogicalTensorError):
    '''A ket expected to have unit norm does not.'''


class EquivalenceViolation(LogicalTensorError):
    '''Two characterizations of one property disagree.'''


class NotUnitary(LogicalTensorError):
    '''An operator expected to be unitary is not.'''


class NotPointwise(LogicalTensorError):
    '''A restriction expected to be pointwise is not.'''


class NotNamePreserving(LogicalTensorError):
    '''An operator couples graphs with different supports.'''


class InvalidRestriction(LogicalTensorError):
    '''A selector fails the restriction axiom on a universe.'''


class NotUnitaryOnRange(LogicalTensorError):
    '''An operator is not unitary on the range of a restriction.'''


class PrerequisiteViolation(LogicalTensorError):
    '''
    Hypotheses of a construction do not hold.

    Attributes
    ----------
    failures : list[str]
        One entry per failed hypothesis.
    '''

    def __init__(self, failures: Sequence[str]):
        self.failures = list(failures)
        super().__init__('prerequisites failed: ' + '; '.join(self.failures))


class ReconstructionFailure(LogicalTensorError):
    '''
    A block decomposition does not reproduce its operator.

    Attributes
    ----------
    deviation : float
        Largest entry-wise deviation found.
    witness : Any
        Basis graph on which it was found.
    '''

    def __init__(self, deviation: float, witness: Optional[Any] = None):
        self.deviation = deviation
        self.witness = witness
        super().__init__(f'reconstruction deviates by {deviation:.3e} on {witness}')
