"""Channel representations and the conversions between them.

Conventions
-----------
* ``vec`` is row-major, so ``vec(D rho D^dag) = (D (x) D^*) vec(rho)`` and the
  superoperator is ``A = sum_a D_a (x) conj(D_a)``.
* The Choi (dynamical) matrix is the reshuffle of ``A``:
  ``B[(i', i), (j', j)] = A[(i', j'), (i, j)]``, equivalently
  ``B = sum_a |D_a>><<D_a|``. Its FIRST tensor factor is the output space and
  its SECOND factor the input space. Trace preservation therefore reads
  ``tr_first(B) = 1`` and unitality ``tr_second(B) = 1``.
* Two channels are the same iff their Choi matrices agree; Kraus sets are
  never compared directly, because of the unitary freedom in choosing them.

All representation objects are frozen dataclasses holding read-only arrays.
Constructors check shapes only. Hermiticity, TP and CP are checked by
:mod:`channelforge.props`, which has to be able to report on maps that fail them.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import matcore as mc
from .errors import BasisError, DimensionError, NotCPError, NotTPError, NotUnitaryError

PSD_TOL = 1e-9
KRAUS_CUTOFF = 1e-10
UNITARY_TOL = 1e-9


def _frozen(m):
    m = mc.as_matrix(m).copy()
    m.setflags(write=False)
    return m


def _frozen_list(ms, n, what):
    out = []
    for m in ms:
        m = _frozen(m)
        if m.shape != (n, n):
            raise DimensionError(f"{what}: expected {n}x{n}, got {m.shape}")
        out.append(m)
    return tuple(out)


def _check_square(m, d, what):
    if m.shape != (d, d):
        raise DimensionError(f"{what}: expected {d}x{d}, got {m.shape}")


@dataclass(frozen=True)
class SuperopA:
    """Superoperator acting on row-major vectorized density matrices."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        _check_square(self.matrix, self.n * self.n, "SuperopA")


@dataclass(frozen=True)
class ChoiB:
    """Choi / dynamical matrix, output (x) input ordering."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        _check_square(self.matrix, self.n * self.n, "ChoiB")


@dataclass(frozen=True)
class KrausSet:
    n: int
    operators: tuple

    def __post_init__(self):
        ops = _frozen_list(self.operators, self.n, "KrausSet operator")
        if not ops:
            raise DimensionError("KrausSet needs at least one operator")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)


@dataclass(frozen=True)
class OSD:
    """Operator sum-difference form: ``rho -> sum D rho D^dag - sum F rho F^dag``."""

    n: int
    positive_part: tuple
    negative_part: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "positive_part", _frozen_list(self.positive_part, self.n, "OSD D"))
        object.__setattr__(self, "negative_part", _frozen_list(self.negative_part, self.n, "OSD F"))
        if not self.positive_part and not self.negative_part:
            raise DimensionError("OSD needs at least one operator")


@dataclass(frozen=True)
class ChiMatrix:
    """Process matrix with respect to an orthonormal operator basis."""

    n: int
    basis: tuple
    matrix: np.ndarray

    def __post_init__(self):
        basis = _frozen_list(self.basis, self.n, "chi basis element")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        _check_square(self.matrix, self.n * self.n, "ChiMatrix")
        check_basis(basis, self.n)


@dataclass(frozen=True)
class StinespringModel:
    """Unitary on system (x) environment with the environment prepared in
    basis state ``env_state_index``."""

    n: int
    env_dim: int
    unitary: np.ndarray
    env_state_index: int = 0
    tol: float = field(default=UNITARY_TOL, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "unitary", _frozen(self.unitary))
        d = self.n * self.env_dim
        _check_square(self.unitary, d, "StinespringModel.unitary")
        if not 0 <= self.env_state_index < self.env_dim:
            raise DimensionError(f"env_state_index {self.env_state_index} outside 0..{self.env_dim - 1}")
        dev = unitarity_deviation(self.unitary)
        if dev > self.tol:
            raise NotUnitaryError(dev)

    def isometry(self) -> np.ndarray:
        """Columns of the unitary that act on ``|phi> (x) |env_state>``; shape (n*m, n)."""
        cols = [j * self.env_dim + self.env_state_index for j in range(self.n)]
        return self.unitary[:, cols].copy()


# AffineQubit (qubit module) is also a member of this union.
Channel = Union[SuperopA, ChoiB, KrausSet, OSD, ChiMatrix, StinespringModel]


def unitarity_deviation(u) -> float:
    u = mc.as_matrix(u)
    eye = np.eye(u.shape[0])
    return max(mc.max_abs(u.conj().T @ u - eye), mc.max_abs(u @ u.conj().T - eye))


# -- operator bases ---------------------------------------------------------


def standard_basis(n: int) -> tuple:
    """Matrix units ``E_ij`` ordered by ``i*n + j``; chi equals the Choi matrix in it."""
    out = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            out.append(e)
    return tuple(out)


def pauli_basis() -> tuple:
    """``{1, sigma_1, sigma_2, sigma_3} / sqrt(2)``."""
    s = 1 / np.sqrt(2)
    return tuple(s * p for p in PAULI)


PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def _basis_columns(basis):
    return np.hstack([mc.vec(a) for a in basis])


def check_basis(basis, n, tol=1e-10):
    if len(basis) != n * n:
        raise BasisError(f"operator basis needs {n * n} elements, got {len(basis)}")
    w = _basis_columns(basis)
    gram = w.conj().T @ w
    dev = mc.max_abs(gram - np.eye(n * n))
    if dev > tol:
        raise BasisError(f"operator basis is not orthonormal (Gram deviation {dev:.3e})")


def resolve_basis(basis, n):
    if basis is None or basis == "standard":
        return standard_basis(n)
    if isinstance(basis, str):
        if basis == "pauli":
            if n != 2:
                raise BasisError("the Pauli basis is only defined here for qubits")
            return pauli_basis()
        raise BasisError(f"unknown basis {basis!r}")
    return tuple(mc.as_matrix(a) for a in basis)


# -- pairwise conversions ---------------------------------------------------


def a_from_kraus(k: KrausSet) -> SuperopA:
    """``A = sum_a D_a (x) conj(D_a)``."""
    a = sum(np.kron(d, d.conj()) for d in k.operators)
    return SuperopA(k.n, a)


def b_from_a(a: SuperopA) -> ChoiB:
    return ChoiB(a.n, mc.reshuffle(a.matrix, a.n))


def a_from_b(b: ChoiB) -> SuperopA:
    return SuperopA(b.n, mc.reshuffle(b.matrix, b.n))


def b_from_kraus(k: KrausSet) -> ChoiB:
    """``B = sum_a |D_a>><<D_a|``."""
    vs = np.hstack([mc.vec(d) for d in k.operators])
    return ChoiB(k.n, vs @ vs.conj().T)


def _spectral_ops(b: ChoiB):
    eig = mc.hermitian_eig(b.matrix)
    ops = [mc.mat(eig.vector(k), b.n) for k in range(eig.eigenvalues.size)]
    return eig.eigenvalues, ops


def kraus_from_b(b: ChoiB, tol: float = PSD_TOL, cutoff: float = KRAUS_CUTOFF) -> KrausSet:
    """Canonical Kraus set ``D_a = sqrt(l_a) mat(v_a)`` from the Choi spectrum.

    Eigenvalues ``<= cutoff`` are dropped, so the operator count is the Kraus
    rank. Raises :class:`NotCPError` if any eigenvalue is below ``-tol``.
    """
    w, ops = _spectral_ops(b)
    if w[-1] < -tol:
        raise NotCPError(w[-1])
    kept = [np.sqrt(lam) * op for lam, op in zip(w, ops) if lam > cutoff]
    if not kept:
        kept = [np.zeros((b.n, b.n))]
    return KrausSet(b.n, kept)


def osd_from_b(b: ChoiB, tol: float = KRAUS_CUTOFF) -> OSD:
    """Split the Choi spectrum into a Kraus-like positive and a subtracted negative family."""
    w, ops = _spectral_ops(b)
    pos = [np.sqrt(lam) * op for lam, op in zip(w, ops) if lam > tol]
    neg = [np.sqrt(-lam) * op for lam, op in zip(w, ops) if lam < -tol]
    if not pos and not neg:
        pos = [np.zeros((b.n, b.n))]
    return OSD(b.n, pos, neg)


def b_from_osd(o: OSD) -> ChoiB:
    b = np.zeros((o.n * o.n, o.n * o.n), dtype=np.complex128)
    for d in o.positive_part:
        v = mc.vec(d)
        b += v @ v.conj().T
    for f in o.negative_part:
        v = mc.vec(f)
        b -= v @ v.conj().T
    return ChoiB(o.n, b)


def osd_from_kraus(k: KrausSet) -> OSD:
    return OSD(k.n, k.operators, ())


def chi_from_kraus(k: KrausSet, basis=None) -> ChiMatrix:
    """``chi_ij = sum_a c_i^a conj(c_j^a)`` with ``c_i^a = tr(A_i^dag D_a)``."""
    basis = resolve_basis(basis, k.n)
    check_basis(basis, k.n)
    coeffs = np.array([[np.trace(a.conj().T @ d) for a in basis] for d in k.operators])
    chi = coeffs.T @ coeffs.conj()
    return ChiMatrix(k.n, basis, chi)


def chi_from_b(b: ChoiB, basis=None) -> ChiMatrix:
    """``chi = W^dag B W`` where W has columns ``vec(A_i)``; valid for NCP maps too."""
    basis = resolve_basis(basis, b.n)
    check_basis(basis, b.n)
    w = _basis_columns(basis)
    return ChiMatrix(b.n, basis, w.conj().T @ b.matrix @ w)


def b_from_chi(c: ChiMatrix) -> ChoiB:
    w = _basis_columns(c.basis)
    return ChoiB(c.n, w @ c.matrix @ w.conj().T)


def kraus_from_chi(c: ChiMatrix, tol: float = PSD_TOL, cutoff: float = KRAUS_CUTOFF) -> KrausSet:
    """Diagonalize chi and rebuild ``D_b = sqrt(l_b) sum_i v_i^b A_i``."""
    eig = mc.hermitian_eig(c.matrix)
    if eig.eigenvalues[-1] < -tol:
        raise NotCPError(eig.eigenvalues[-1])
    ops = []
    for k, lam in enumerate(eig.eigenvalues):
        if lam > cutoff:
            v = eig.eigenvectors[:, k]
            ops.append(np.sqrt(lam) * sum(vi * a for vi, a in zip(v, c.basis)))
    if not ops:
        ops = [np.zeros((c.n, c.n))]
    return KrausSet(c.n, ops)


def kraus_tp_deviation(ops: Sequence[np.ndarray], subtract: Sequence[np.ndarray] = ()) -> float:
    n = ops[0].shape[0] if ops else subtract[0].shape[0]
    s = sum((d.conj().T @ d for d in ops), np.zeros((n, n), dtype=np.complex128))
    s = s - sum((f.conj().T @ f for f in subtract), np.zeros((n, n), dtype=np.complex128))
    return mc.max_abs(s - np.eye(n))


def _orthonormal_completion(v, tol=1e-10):
    """Extend orthonormal columns ``v`` (d x r) to a d x d unitary by Gram-Schmidt
    over the canonical basis vectors, taken in order."""
    d, r = v.shape
    basis = [v[:, j] for j in range(r)]
    extra = []
    for i in range(d):
        if len(basis) == d:
            break
        e = np.zeros(d, dtype=np.complex128)
        e[i] = 1.0
        for _ in range(2):
            for b in basis:
                e = e - (b.conj() @ e) * b
        nrm = np.linalg.norm(e)
        if nrm > tol:
            e = e / nrm
            basis.append(e)
            extra.append(e)
    return np.array(extra).T.reshape(d, d - r)


def stinespring_from_kraus(k: KrausSet, tol: float = PSD_TOL) -> StinespringModel:
    """Dilate a TP Kraus set to a unitary on system (x) environment.

    The environment has one basis state per Kraus operator and starts in
    ``|0>``; ``U |phi>|0> = sum_a D_a|phi>|a>``. The remaining columns are
    filled by deterministic Gram-Schmidt completion.
    """
    dev = kraus_tp_deviation(k.operators)
    if dev > tol:
        raise NotTPError(dev, f"Kraus set is not trace preserving (deviation {dev:.3e}); no isometric dilation")
    n, m = k.n, len(k.operators)
    d = n * m
    v = np.zeros((d, n), dtype=np.complex128)
    for a, op in enumerate(k.operators):
        v[a::m, :] = op  # rows (i, a) -> i*m + a
    fixed = [j * m for j in range(n)]
    free = [c for c in range(d) if c not in fixed]
    u = np.zeros((d, d), dtype=np.complex128)
    u[:, fixed] = v
    if free:
        u[:, free] = _orthonormal_completion(v)
    return StinespringModel(n, m, u, 0, tol=max(tol, UNITARY_TOL))


def kraus_from_environment(u, env_probs, n: int, tol: float = UNITARY_TOL) -> KrausSet:
    """Kraus operators ``sqrt(p_k') <k|U|k'>`` of a system-environment unitary.

    The environment starts in ``sum_k' p_k' |k'><k'|``; terms with
    ``p_k' == 0`` are omitted. Operators are ordered by ``(k, k')``.
    """
    u = mc.as_matrix(u)
    probs = np.asarray(env_probs, dtype=float).ravel()
    m = probs.size
    if m == 0 or u.shape != (n * m, n * m):
        raise DimensionError(f"unitary of shape {u.shape} does not match n={n}, env_dim={m}")
    if np.any(~np.isfinite(probs)) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("env_probs must be a probability vector")
    dev = unitarity_deviation(u)
    if dev > tol:
        raise NotUnitaryError(dev)
    blocks = u.reshape(n, m, n, m)  # [i, k, j, k']
    ops = []
    for kk in range(m):
        for kp in range(m):
            if probs[kp] > 0:
                ops.append(np.sqrt(probs[kp]) * blocks[:, kk, :, kp])
    return KrausSet(n, ops)


def kraus_from_stinespring(s: StinespringModel) -> KrausSet:
    probs = np.zeros(s.env_dim)
    probs[s.env_state_index] = 1.0
    return kraus_from_environment(s.unitary, probs, s.n, tol=s.tol)


# -- generic dispatch -------------------------------------------------------


@functools.singledispatch
def to_choi(ch) -> ChoiB:
    """Choi matrix of any representation."""
    raise TypeError(f"not a channel representation: {type(ch).__name__}")


to_choi.register(ChoiB, lambda ch: ch)
to_choi.register(SuperopA, b_from_a)
to_choi.register(KrausSet, b_from_kraus)
to_choi.register(OSD, b_from_osd)
to_choi.register(ChiMatrix, b_from_chi)
to_choi.register(StinespringModel, lambda ch: b_from_kraus(kraus_from_stinespring(ch)))


@functools.singledispatch
def to_superop(ch) -> SuperopA:
    return a_from_b(to_choi(ch))


to_superop.register(SuperopA, lambda ch: ch)
to_superop.register(KrausSet, a_from_kraus)


def choi_matrix(ch) -> np.ndarray:
    return to_choi(ch).matrix


def _check_state(ch, rho):
    rho = mc.as_matrix(rho)
    if rho.shape != (ch.n, ch.n):
        raise DimensionError(f"state of shape {rho.shape} for a channel on dimension {ch.n}")
    return rho


def _sandwich(ops, rho):
    return sum((d @ rho @ d.conj().T for d in ops), np.zeros_like(rho))


@functools.singledispatch
def apply(ch, rho) -> np.ndarray:
    """Evaluate the channel on ``rho`` using the representation's own formula."""
    raise TypeError(f"not a channel representation: {type(ch).__name__}")


@apply.register
def _(ch: SuperopA, rho):
    rho = _check_state(ch, rho)
    return mc.mat(ch.matrix @ mc.vec(rho), ch.n)


@apply.register
def _(ch: ChoiB, rho):
    rho = _check_state(ch, rho)
    lhs = np.kron(np.eye(ch.n), rho.T)
    return mc.partial_trace(lhs @ ch.matrix, ch.n, ch.n, "second")


@apply.register
def _(ch: KrausSet, rho):
    return _sandwich(ch.operators, _check_state(ch, rho))


@apply.register
def _(ch: OSD, rho):
    rho = _check_state(ch, rho)
    return _sandwich(ch.positive_part, rho) - _sandwich(ch.negative_part, rho)


@apply.register
def _(ch: ChiMatrix, rho):
    rho = _check_state(ch, rho)
    out = np.zeros_like(rho)
    for i, ai in enumerate(ch.basis):
        left = ai @ rho
        for j, aj in enumerate(ch.basis):
            if ch.matrix[i, j] != 0:
                out += ch.matrix[i, j] * left @ aj.conj().T
    return out


@apply.register
def _(ch: StinespringModel, rho):
    rho = _check_state(ch, rho)
    env = np.zeros((ch.env_dim, ch.env_dim), dtype=np.complex128)
    env[ch.env_state_index, ch.env_state_index] = 1.0
    joint = ch.unitary @ np.kron(rho, env) @ ch.unitary.conj().T
    return mc.partial_trace(joint, ch.n, ch.env_dim, "second")


def compose(ch1, ch2) -> SuperopA:
    """Channel that applies ``ch1`` first and then ``ch2``; superoperator ``A2 @ A1``."""
    if ch1.n != ch2.n:
        raise DimensionError(f"cannot compose channels on dimensions {ch1.n} and {ch2.n}")
    return SuperopA(ch1.n, to_superop(ch2).matrix @ to_superop(ch1).matrix)


def identity_channel(n: int = 2) -> KrausSet:
    return KrausSet(n, [np.eye(n)])


def remix_kraus(k: KrausSet, u) -> KrausSet:
    """``K_b = sum_a U_ba D_a`` for a unitary (or isometry) ``U`` with ``len(k)`` columns."""
    u = mc.as_matrix(u)
    if u.shape[1] != len(k.operators):
        raise DimensionError(f"mixing matrix needs {len(k.operators)} columns, got {u.shape}")
    stack = np.array(k.operators)
    return KrausSet(k.n, list(np.tensordot(u, stack, axes=(1, 0))))
