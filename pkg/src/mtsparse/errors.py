"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """Raised when an iterative routine fails to produce usable numbers.

    Covers non-finite objective values inside a solve and iteration caps
    hit without convergence.  Contract violations (bad shapes, invalid
    parameters) raise ValueError instead.
    """
