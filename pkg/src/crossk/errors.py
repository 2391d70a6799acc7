"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ``InvalidArgument`` -> 2,
``ResourceLimit`` -> 3. ``UnsupportedOperation`` is also an input error.
"""


class CrossKError(Exception):
    """Base class for toolkit errors."""


class InvalidArgument(CrossKError, ValueError):
    pass


class UnsupportedOperation(CrossKError, NotImplementedError):
    pass


class ResourceLimit(CrossKError, RuntimeError):
    pass
