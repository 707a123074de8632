"""Exception types raised across the package."""


class ChannelError(ValueError):
    """Base class for all channelforge errors."""


class DimensionError(ChannelError):
    pass


class NotHermitianError(ChannelError):
    def __init__(self, deviation, message=None):
        self.deviation = float(deviation)
        super().__init__(message or f"matrix is not Hermitian (max |h - h^dag| = {self.deviation:.3e})")


class NotCPError(ChannelError):
    """The Choi matrix has a negative eigenvalue beyond tolerance.

    ``min_eigenvalue`` is the witness. For such maps use
    :func:`channelforge.reps.osd_from_b` instead of a Kraus decomposition.
    """

    def __init__(self, min_eigenvalue, message=None):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            message
            or f"map is not completely positive (min Choi eigenvalue {self.min_eigenvalue:.6g}); "
            "use the operator sum-difference form"
        )


class BasisError(ChannelError):
    pass


class NotTPError(ChannelError):
    """Raised where trace preservation is a precondition (Stinespring, affine form)."""

    def __init__(self, deviation, message=None):
        self.deviation = float(deviation)
        super().__init__(message or f"map is not trace preserving (deviation {self.deviation:.3e})")


class NotUnitaryError(ChannelError):
    def __init__(self, deviation, message=None):
        self.deviation = float(deviation)
        super().__init__(message or f"matrix is not unitary (max |U^dag U - 1| = {self.deviation:.3e})")


class InvalidStateError(ChannelError):
    pass


class NumericalError(ChannelError):
    pass
