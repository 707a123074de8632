"""Qubit channels in Bloch coordinates.

A qubit state is ``rho = (1 + a . sigma) / 2`` with Bloch vector ``a``,
``a_i = tr(rho sigma_i)``. A trace-preserving, Hermiticity-preserving qubit
map acts affinely on it, ``a -> T a + t``, where ``E(1) = 1 + t . sigma`` and
``T_ij = tr(sigma_i E(sigma_j)) / 2``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import matcore as mc
from . import reps
from .errors import DimensionError, InvalidStateError, NotHermitianError, NotTPError, NotUnitaryError
from .props import check_hermiticity_preserving, sample_ball, tp_deviation, unital_deviation
from .randomize import rng_from
from .reps import PAULI, ChoiB, KrausSet

SIGMA = PAULI[1:]
STATE_TOL = 1e-9


@dataclass(frozen=True)
class BlochVector:
    a1: float
    a2: float
    a3: float

    @classmethod
    def from_array(cls, a):
        a1, a2, a3 = (float(x) for x in np.asarray(a, dtype=float).ravel())
        return cls(a1, a2, a3)

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def is_physical(self, tol: float = STATE_TOL) -> bool:
        return self.radius <= 1 + tol


@dataclass(frozen=True)
class ScalingParams:
    """Axis scalings ``E(sigma_i) = z_i sigma_i`` of a unital qubit map."""

    z1: float
    z2: float
    z3: float

    def __post_init__(self):
        for z in (self.z1, self.z2, self.z3):
            if not abs(z) <= 1.0:
                raise ValueError(f"scaling parameters must lie in [-1, 1], got {z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3])


@dataclass(frozen=True)
class AffineQubit:
    """Bloch-vector action ``a -> T a + t`` of a trace-preserving qubit map."""

    T: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        T = np.array(self.T, dtype=float).reshape(3, 3)
        t = np.array(self.t, dtype=float).reshape(3)
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(t))):
            raise ValueError("affine map has non-finite entries")
        T.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return 2

    def is_unital(self, tol: float = STATE_TOL) -> bool:
        return float(np.linalg.norm(self.t)) <= tol

    def map_bloch(self, a) -> np.ndarray:
        """Image of one Bloch vector (shape 3) or a stack of them (shape (N, 3))."""
        a = np.asarray(a, dtype=float)
        return a @ self.T.T + self.t


# -- states ---------------------------------------------------------------


def bloch_from_density(rho, tol: float = STATE_TOL) -> BlochVector:
    rho = mc.as_matrix(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 density matrix, got {rho.shape}")
    dev = mc.hermiticity_deviation(rho)
    if dev > tol:
        raise NotHermitianError(dev)
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidStateError(f"density matrix has trace {tr.real:.12g}, expected 1")
    return BlochVector.from_array([np.trace(rho @ s).real for s in SIGMA])


def density_from_bloch(a, tol: float = STATE_TOL) -> np.ndarray:
    if not isinstance(a, BlochVector):
        a = BlochVector.from_array(a)
    if not a.is_physical(tol):
        raise InvalidStateError(f"Bloch vector of length {a.radius:.6g} lies outside the unit ball")
    return 0.5 * np.array(
        [[1 + a.a3, a.a1 - 1j * a.a2], [a.a1 + 1j * a.a2, 1 - a.a3]], dtype=np.complex128
    )


# -- affine form <-> channel ------------------------------------------------


def affine_from_channel(ch, tol: float = STATE_TOL) -> AffineQubit:
    if isinstance(ch, AffineQubit):
        return ch
    if ch.n != 2:
        raise DimensionError(f"affine Bloch form needs a qubit channel, got n={ch.n}")
    herm = check_hermiticity_preserving(ch, tol)
    if not herm.ok:
        raise NotHermitianError(herm.value, "map does not preserve Hermiticity; no real affine form")
    dev = tp_deviation(ch)
    if dev > tol:
        raise NotTPError(dev)
    a = reps.to_superop(ch)
    e1 = reps.apply(a, np.eye(2))
    t = [0.5 * np.trace(s @ e1).real for s in SIGMA]
    T = [[0.5 * np.trace(si @ reps.apply(a, sj)).real for sj in SIGMA] for si in SIGMA]
    return AffineQubit(T, t)


def _affine_apply(aff: AffineQubit, x):
    """Linear extension of the affine action to an arbitrary 2x2 matrix."""
    x = mc.as_matrix(x)
    tr = np.trace(x)
    out = 0.5 * tr * (np.eye(2) + sum(ti * s for ti, s in zip(aff.t, SIGMA)))
    coords = [np.trace(s @ x) for s in SIGMA]
    for i, si in enumerate(SIGMA):
        out = out + 0.5 * sum(aff.T[i, j] * coords[j] for j in range(3)) * si
    return out


def channel_from_affine(aff: AffineQubit) -> ChoiB:
    """Choi matrix of the map with Bloch action ``a -> T a + t``.

    The result need not be CP. For diagonal ``T = diag(z)`` and ``t = 0`` it is
    the familiar unital form with ``(1 +- z3)/2`` and ``(z1 +- z2)/2`` entries.
    """
    cols = []
    for e in reps.standard_basis(2):
        cols.append(mc.vec(_affine_apply(aff, e)))
    a = np.hstack(cols)
    return ChoiB(2, mc.reshuffle(a, 2))


def unital_choi_eigenvalues(z) -> tuple:
    """Closed-form Choi spectrum of the unital map ``sigma_i -> z_i sigma_i``."""
    if isinstance(z, ScalingParams):
        z = z.as_array()
    z1, z2, z3 = (float(v) for v in z)
    return (
        0.5 * (1 + z1 - z2 - z3),
        0.5 * (1 - z1 + z2 - z3),
        0.5 * (1 - z1 - z2 + z3),
        0.5 * (1 + z1 + z2 + z3),
    )


def unital_channel(z) -> ChoiB:
    if isinstance(z, ScalingParams):
        z = z.as_array()
    return channel_from_affine(AffineQubit(np.diag(np.asarray(z, dtype=float)), np.zeros(3)))


reps.to_choi.register(AffineQubit, channel_from_affine)
reps.apply.register(AffineQubit, _affine_apply)
tp_deviation.register(AffineQubit, lambda ch: 0.0)
unital_deviation.register(AffineQubit, lambda ch: float(np.max(np.abs(ch.t))))


# -- the zoo --------------------------------------------------------------


def _check_p(p):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def identity() -> KrausSet:
    return KrausSet(2, [np.eye(2)])


def depolarizing(p) -> KrausSet:
    """Bloch ball contracted uniformly: ``a -> (1 - p) a``."""
    p = _check_p(p)
    return KrausSet(
        2,
        [np.sqrt(1 - 3 * p / 4) * np.eye(2)] + [np.sqrt(p / 4) * s for s in SIGMA],
    )


def phase_damping(p) -> KrausSet:
    """Transverse components scaled by ``1 - p``; ``a3`` unchanged."""
    p = _check_p(p)
    return KrausSet(2, [np.sqrt(1 - p / 2) * np.eye(2), np.sqrt(p / 2) * SIGMA[2]])


def amplitude_damping(p) -> KrausSet:
    p = _check_p(p)
    d1 = np.array([[1, 0], [0, np.sqrt(1 - p)]])
    d2 = np.array([[0, np.sqrt(p)], [0, 0]])
    return KrausSet(2, [d1, d2])


def unitary_channel(u, tol: float = reps.UNITARY_TOL) -> KrausSet:
    u = mc.as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got {u.shape}")
    dev = reps.unitarity_deviation(u)
    if dev > tol:
        raise NotUnitaryError(dev)
    return KrausSet(u.shape[0], [u])


def rotation(axis: str, angle: float) -> np.ndarray:
    """``exp(-i angle sigma_axis / 2)``; rotates the Bloch ball by ``angle``."""
    s = SIGMA["xyz".index(axis)]
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * s


def spin_reversal() -> ChoiB:
    """``a -> -a``; positive but not completely positive."""
    return ChoiB(2, np.array([[0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 0]]))


def transpose_map() -> ChoiB:
    return ChoiB(2, np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))


def pancake_ncp() -> ChoiB:
    """Projection of the ball onto the unit disc in the x-y plane."""
    return ChoiB(2, np.array([[0.5, 0, 0, 1], [0, 0.5, 0, 0], [0, 0, 0.5, 0], [1, 0, 0, 0.5]]))


def pancake_cp() -> KrausSet:
    """Ball onto the disc of radius 1/2: ``z = (1/2, 1/2, 0)``.

    As a Pauli channel the weights are ``(1 + z1 + z2 + z3)/4 = 1/2`` on the
    identity and ``1/4`` on each of sigma_1 and sigma_2.
    """
    return KrausSet(2, [np.sqrt(0.5) * np.eye(2), 0.5 * SIGMA[0], 0.5 * SIGMA[1]])


ZOO = {
    "identity": identity,
    "depolarizing": depolarizing,
    "phase-damping": phase_damping,
    "amplitude-damping": amplitude_damping,
    "spin-reversal": spin_reversal,
    "transpose": transpose_map,
    "pancake-ncp": pancake_ncp,
    "pancake-cp": pancake_cp,
}
PARAMETRIZED = {"depolarizing", "phase-damping", "amplitude-damping"}


# -- Bloch-ball images ------------------------------------------------------


def sample_sphere(n_samples: int, rng) -> np.ndarray:
    """Uniform points on the unit sphere (Marsaglia's method)."""
    rng = rng_from(rng)
    out = np.empty((0, 2))
    while out.shape[0] < n_samples:
        uv = rng.uniform(-1.0, 1.0, size=(2 * (n_samples - out.shape[0]) + 8, 2))
        s = np.sum(uv**2, axis=1)
        out = np.vstack([out, uv[(s < 1.0) & (s > 0.0)]])
    uv = out[:n_samples]
    s = np.sum(uv**2, axis=1)
    root = np.sqrt(1 - s)
    return np.column_stack([2 * uv[:, 0] * root, 2 * uv[:, 1] * root, 1 - 2 * s])


@dataclass
class BlochImage:
    inputs: np.ndarray
    outputs: np.ndarray

    @property
    def max_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.outputs, axis=1)))

    @property
    def centroid(self) -> np.ndarray:
        return self.outputs.mean(axis=0)

    def to_csv(self) -> str:
        from .serialization import fmt_float

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ax", "ay", "az", "bx", "by", "bz"])
        for a, b in zip(self.inputs, self.outputs):
            w.writerow([fmt_float(x) for x in (*a, *b)])
        return buf.getvalue()


def bloch_image_sample(ch, n_samples: int = 2048, seed=0, mode: str = "surface") -> BlochImage:
    """Map sampled Bloch vectors through the channel's affine action.

    ``mode="surface"`` samples pure states uniformly on the sphere,
    ``mode="ball"`` samples uniformly inside the ball.
    """
    if ch.n != 2:
        raise DimensionError(f"Bloch images need a qubit channel, got n={ch.n}")
    rng = rng_from(seed)
    if mode == "surface":
        pts = sample_sphere(n_samples, rng)
    elif mode == "ball":
        pts = sample_ball(n_samples, rng)
    else:
        raise ValueError(f"mode must be 'surface' or 'ball', not {mode!r}")
    aff = affine_from_channel(ch)
    return BlochImage(pts, aff.map_bloch(pts))
