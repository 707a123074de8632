"""Markovian (GKSL/Lindblad) generators and their integration.

Units: hbar = 1, so the Hamiltonian is in inverse time and Lindblad
operators carry rates under a square root (inverse square-root time).

All schemes are fixed-step and act on the vectorized state through an
``n^2 x n^2`` one-step propagator built once per run:

* ``euler``      ``P = 1 + h L``
* ``rk4``        ``P = sum_{k<=4} (h L)^k / k!`` (classical RK4 on a linear ODE)
* ``kraus-step`` ``P = sum_a D_a (x) conj(D_a)`` from :func:`small_step_kraus`;
                 CP by construction, trace preserved only to ``O(h^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore as mc
from . import reps
from .errors import DimensionError, InvalidStateError, NotHermitianError

SCHEMES = ("euler", "rk4", "kraus-step")
STATE_TOL = 1e-9


@dataclass(frozen=True)
class LindbladGenerator:
    n: int
    hamiltonian: np.ndarray
    lindblads: tuple = ()
    tol: float = 1e-9

    def __post_init__(self):
        h = mc.as_matrix(self.hamiltonian).copy()
        if h.shape != (self.n, self.n):
            raise DimensionError(f"Hamiltonian must be {self.n}x{self.n}, got {h.shape}")
        dev = mc.hermiticity_deviation(h)
        if dev > self.tol:
            raise NotHermitianError(dev, f"Hamiltonian is not Hermitian (deviation {dev:.3e})")
        h.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        ls = []
        for op in self.lindblads:
            op = mc.as_matrix(op).copy()
            if op.shape != (self.n, self.n):
                raise DimensionError(f"Lindblad operator must be {self.n}x{self.n}, got {op.shape}")
            op.setflags(write=False)
            ls.append(op)
        object.__setattr__(self, "lindblads", tuple(ls))

    @classmethod
    def zero(cls, n: int) -> "LindbladGenerator":
        return cls(n, np.zeros((n, n)))


@dataclass(frozen=True)
class EvolutionConfig:
    total_time: float
    steps: int = 1000
    scheme: str = "rk4"

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, not {self.scheme!r}")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps


def l0_from_lindblads(g: LindbladGenerator) -> np.ndarray:
    """``L0 = -1/2 sum_a L_a^dag L_a``, the Hermitian part that keeps the trace fixed."""
    out = np.zeros((g.n, g.n), dtype=np.complex128)
    for op in g.lindblads:
        out -= 0.5 * op.conj().T @ op
    return out


def generator_apply(g: LindbladGenerator, rho) -> np.ndarray:
    """``-i[H, rho] + sum_a (L rho L^dag - {L^dag L, rho}/2)``."""
    rho = mc.as_matrix(rho)
    if rho.shape != (g.n, g.n):
        raise DimensionError(f"state of shape {rho.shape} for a generator on dimension {g.n}")
    h = g.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for op in g.lindblads:
        ld = op.conj().T
        ldl = ld @ op
        out += op @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def generator_superop(g: LindbladGenerator) -> np.ndarray:
    """Matrix of :func:`generator_apply` on row-major ``vec(rho)``.

    Uses ``vec(X rho Y) = (X (x) Y^T) vec(rho)``.
    """
    n = g.n
    eye = np.eye(n)
    h = g.hamiltonian
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in g.lindblads:
        ldl = op.conj().T @ op
        sup += np.kron(op, op.conj()) - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def small_step_kraus(g: LindbladGenerator, dt: float) -> reps.KrausSet:
    """Kraus set of one short step: ``D0 = 1 + (L0 - iH) dt``, ``D_a = L_a sqrt(dt)``.

    Trace is preserved to first order only; see :func:`step_tp_defect`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    d0 = np.eye(g.n) + (l0_from_lindblads(g) - 1j * g.hamiltonian) * dt
    return reps.KrausSet(g.n, [d0] + [op * np.sqrt(dt) for op in g.lindblads])


def step_tp_defect(g: LindbladGenerator, dt: float) -> tuple:
    """``(defect, C)`` with ``defect = max|sum D^dag D - 1|`` of one short step and ``C = defect / dt^2``."""
    k = small_step_kraus(g, dt)
    defect = reps.kraus_tp_deviation(k.operators)
    return defect, defect / dt**2


def step_propagator(g: LindbladGenerator, dt: float, scheme: str = "rk4") -> np.ndarray:
    d = g.n * g.n
    if scheme == "kraus-step":
        return reps.a_from_kraus(small_step_kraus(g, dt)).matrix
    hl = dt * generator_superop(g)
    if scheme == "euler":
        return np.eye(d) + hl
    if scheme == "rk4":
        term = np.eye(d, dtype=np.complex128)
        out = term.copy()
        for k in range(1, 5):
            term = term @ hl / k
            out += term
        return out
    raise ValueError(f"scheme must be one of {SCHEMES}, not {scheme!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (steps + 1, n, n)

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def __len__(self):
        return len(self.times)

    def max_trace_drift(self) -> float:
        tr = np.trace(self.states, axis1=1, axis2=2)
        return float(np.max(np.abs(tr - 1.0)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.states)))


def _check_density(rho, n, tol=STATE_TOL):
    rho = mc.as_matrix(rho)
    if rho.shape != (n, n):
        raise DimensionError(f"initial state must be {n}x{n}, got {rho.shape}")
    if mc.hermiticity_deviation(rho) > tol:
        raise InvalidStateError("initial state is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"initial state has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -tol:
        raise InvalidStateError("initial state is not positive semidefinite")
    return rho


def evolve(g: LindbladGenerator, rho0, cfg: EvolutionConfig) -> Trajectory:
    """Fixed-step integration from ``rho0`` over ``cfg.total_time``.

    Each step is followed by ``rho <- (rho + rho^dag)/2``. The trace is NOT
    renormalized, so trace drift stays visible as an error signal.
    """
    n = g.n
    rho = _check_density(rho0, n).copy()
    prop = step_propagator(g, cfg.dt, cfg.scheme)
    states = np.empty((cfg.steps + 1, n, n), dtype=np.complex128)
    states[0] = rho
    v = rho.reshape(-1)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, cfg.steps + 1):
            m = (prop @ v).reshape(n, n)
            m = 0.5 * (m + m.conj().T)
            states[k] = m
            v = m.reshape(-1)
    times = np.linspace(0.0, cfg.total_time, cfg.steps + 1)
    return Trajectory(times, states)


def channel_from_generator(g: LindbladGenerator, t: float, steps: int = 10_000, scheme: str = "rk4") -> reps.SuperopA:
    """Finite-time channel ``exp(t L)`` as the ``steps``-fold product of one-step propagators."""
    if not t > 0:
        raise ValueError("t must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    prop = step_propagator(g, t / steps, scheme)
    return reps.SuperopA(g.n, np.linalg.matrix_power(prop, int(steps)))
