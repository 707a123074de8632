"""Finite-dimensional quantum channels: representations, validation, qubit
geometry and Lindblad dynamics."""
from . import dynamics, matcore, props, qubit, reps, serialization
from .dynamics import EvolutionConfig, LindbladGenerator, channel_from_generator, evolve
from .errors import (
    BasisError,
    ChannelError,
    DimensionError,
    InvalidStateError,
    NotCPError,
    NotHermitianError,
    NotTPError,
    NotUnitaryError,
    NumericalError,
)
from .matcore import BACKEND
from .props import check_cp, check_tp, same_channel, validate
from .qubit import AffineQubit, BlochVector
from .reps import OSD, ChiMatrix, ChoiB, KrausSet, StinespringModel, SuperopA, apply, compose, to_choi, to_superop

__version__ = "0.1.0"
