"""Structural checks on channels: Hermiticity preservation, TP, CP, unitality,
Kraus rank, the Choi state, channel equality and positivity-domain probing."""
from __future__ import annotations

import functools
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import matcore as mc
from . import reps
from .errors import DimensionError, NotCPError, NotTPError
from .randomize import random_pure_state, rng_from

PSD_TOL = reps.PSD_TOL
SAME_CHANNEL_TOL = 1e-8


class Check(NamedTuple):
    ok: bool
    value: float


# -- trace preservation -----------------------------------------------------


@functools.singledispatch
def tp_deviation(ch) -> float:
    return tp_deviation(reps.to_choi(ch))


@tp_deviation.register
def _(ch: reps.KrausSet):
    return reps.kraus_tp_deviation(ch.operators)


@tp_deviation.register
def _(ch: reps.OSD):
    return reps.kraus_tp_deviation(ch.positive_part, ch.negative_part)


@tp_deviation.register
def _(ch: reps.ChoiB):
    return mc.max_abs(mc.partial_trace(ch.matrix, ch.n, ch.n, "first") - np.eye(ch.n))


@tp_deviation.register
def _(ch: reps.SuperopA):
    n = ch.n
    a = ch.matrix.reshape(n, n, n * n)  # [i', j', (i, j)]
    traced = np.einsum("kkc->c", a).reshape(n, n)
    return mc.max_abs(traced - np.eye(n))


@tp_deviation.register
def _(ch: reps.ChiMatrix):
    s = sum(
        ch.matrix[i, j] * aj.conj().T @ ai
        for i, ai in enumerate(ch.basis)
        for j, aj in enumerate(ch.basis)
    )
    return mc.max_abs(s - np.eye(ch.n))


@tp_deviation.register
def _(ch: reps.StinespringModel):
    return tp_deviation(reps.kraus_from_stinespring(ch))


def check_tp(ch, tol: float = PSD_TOL) -> Check:
    dev = tp_deviation(ch)
    return Check(dev <= tol, dev)


# -- unitality --------------------------------------------------------------


@functools.singledispatch
def unital_deviation(ch) -> float:
    b = reps.to_choi(ch)
    return mc.max_abs(mc.partial_trace(b.matrix, b.n, b.n, "second") - np.eye(b.n))


@unital_deviation.register
def _(ch: reps.KrausSet):
    s = sum(d @ d.conj().T for d in ch.operators)
    return mc.max_abs(s - np.eye(ch.n))


def check_unital(ch, tol: float = PSD_TOL) -> Check:
    dev = unital_deviation(ch)
    return Check(dev <= tol, dev)


# -- Hermiticity, CP, rank --------------------------------------------------


def check_hermiticity_preserving(ch, tol: float = PSD_TOL) -> Check:
    dev = mc.hermiticity_deviation(reps.choi_matrix(ch))
    return Check(dev <= tol, dev)


def choi_eigenvalues(ch) -> np.ndarray:
    """Descending eigenvalues of the Hermitian part of the Choi matrix."""
    b = reps.choi_matrix(ch)
    return mc.hermitian_eig(0.5 * (b + b.conj().T)).eigenvalues


def check_cp(ch, tol: float = PSD_TOL) -> Check:
    """CP iff the Choi matrix is Hermitian and its smallest eigenvalue is ``>= -tol``.

    ``value`` is that smallest eigenvalue (of the Hermitian part, if the map
    does not preserve Hermiticity).
    """
    b = reps.choi_matrix(ch)
    lam_min = float(choi_eigenvalues(ch)[-1])
    return Check(lam_min >= -tol and mc.hermiticity_deviation(b) <= tol, lam_min)


def kraus_rank(ch, tol: float = reps.KRAUS_CUTOFF) -> int:
    return int(np.sum(np.abs(choi_eigenvalues(ch)) > tol))


def choi_state(ch, tol: float = PSD_TOL) -> np.ndarray:
    """Normalized Choi matrix ``B / n``, a density matrix on n (x) n."""
    cp = check_cp(ch, tol)
    if not cp.ok:
        raise NotCPError(cp.value)
    tp = check_tp(ch, tol)
    if not tp.ok:
        raise NotTPError(tp.value)
    return reps.choi_matrix(ch) / ch.n


def same_channel(ch1, ch2, tol: float = SAME_CHANNEL_TOL) -> bool:
    if ch1.n != ch2.n:
        raise DimensionError(f"channels act on dimensions {ch1.n} and {ch2.n}")
    return choi_distance(ch1, ch2) <= tol


def choi_distance(ch1, ch2) -> float:
    return mc.frobenius_distance(reps.choi_matrix(ch1), reps.choi_matrix(ch2))


# -- report -----------------------------------------------------------------


@dataclass
class ValidationReport:
    hermiticity_preserving: bool
    hermiticity_deviation: float
    trace_preserving: bool
    tp_deviation: float
    completely_positive: bool
    min_choi_eigenvalue: float
    unital: bool
    unital_deviation: float
    kraus_rank: int
    choi_trace: float
    tolerance_used: float
    n: int = field(default=0)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def valid(self) -> bool:
        return self.completely_positive and self.trace_preserving


def validate(ch, tol: float = PSD_TOL) -> ValidationReport:
    herm = check_hermiticity_preserving(ch, tol)
    tp = check_tp(ch, tol)
    cp = check_cp(ch, tol)
    un = check_unital(ch, tol)
    return ValidationReport(
        hermiticity_preserving=bool(herm.ok),
        hermiticity_deviation=float(herm.value),
        trace_preserving=bool(tp.ok),
        tp_deviation=float(tp.value),
        completely_positive=bool(cp.ok),
        min_choi_eigenvalue=float(cp.value),
        unital=bool(un.ok),
        unital_deviation=float(un.value),
        kraus_rank=kraus_rank(ch),
        choi_trace=float(np.trace(reps.choi_matrix(ch)).real),
        tolerance_used=float(tol),
        n=int(ch.n),
    )


# -- positivity domain ------------------------------------------------------


@dataclass
class DomainProbeResult:
    samples_tested: int
    violations: list  # (input density matrix, min output eigenvalue)
    min_output_eigenvalue: float = float("inf")

    @property
    def violation_fraction(self) -> float:
        return len(self.violations) / self.samples_tested if self.samples_tested else 0.0


def sample_ball(n_samples: int, rng) -> np.ndarray:
    """Uniform points in the unit ball by rejection from the enclosing cube."""
    rng = rng_from(rng)
    out = np.empty((0, 3))
    while out.shape[0] < n_samples:
        pts = rng.uniform(-1.0, 1.0, size=(2 * (n_samples - out.shape[0]) + 8, 3))
        out = np.vstack([out, pts[np.sum(pts**2, axis=1) <= 1.0]])
    return out[:n_samples]


def _qubit_states(bloch):
    a1, a2, a3 = bloch[:, 0], bloch[:, 1], bloch[:, 2]
    rho = np.empty((bloch.shape[0], 2, 2), dtype=np.complex128)
    rho[:, 0, 0] = 1 + a3
    rho[:, 0, 1] = a1 - 1j * a2
    rho[:, 1, 0] = a1 + 1j * a2
    rho[:, 1, 1] = 1 - a3
    return 0.5 * rho


def probe_positivity_domain(ch, n_samples: int = 10_000, seed=0, tol: float = PSD_TOL) -> DomainProbeResult:
    """Apply ``ch`` to random states and record outputs that are not positive.

    Qubit channels are probed with states uniform in the Bloch ball; larger
    systems with Haar-random pure states.
    """
    rng = rng_from(seed)
    n = ch.n
    a = reps.to_superop(ch).matrix
    if n == 2:
        states = _qubit_states(sample_ball(n_samples, rng))
    else:
        states = np.array([random_pure_state(n, rng) for _ in range(n_samples)])
    outs = (states.reshape(n_samples, n * n) @ a.T).reshape(n_samples, n, n)
    outs = 0.5 * (outs + np.conj(np.swapaxes(outs, 1, 2)))
    mins = np.linalg.eigvalsh(outs)[:, 0]
    bad = np.flatnonzero(mins < -tol)
    return DomainProbeResult(
        samples_tested=n_samples,
        violations=[(states[i], float(mins[i])) for i in bad],
        min_output_eigenvalue=float(mins.min()) if n_samples else float("inf"),
    )
