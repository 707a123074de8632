"""Seeded random states, unitaries and channels."""
from __future__ import annotations

import numpy as np

from . import reps


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows, cols, rng) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with the R-diagonal phases removed."""
    rng = rng_from(rng)
    q, r = np.linalg.qr(ginibre(d, d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(n: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    psi = ginibre(n, 1, rng)
    psi /= np.linalg.norm(psi)
    return psi @ psi.conj().T


def random_density(n: int, rng, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dag / tr`` (Hilbert-Schmidt measure for full rank)."""
    rng = rng_from(rng)
    g = ginibre(n, rank or n, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_cptp(n: int, env_dim: int, rng) -> reps.KrausSet:
    """Kraus set of ``U (rho (x) |0><0|) U^dag`` reduced over an ``env_dim`` environment."""
    rng = rng_from(rng)
    u = haar_unitary(n * env_dim, rng)
    probs = np.zeros(env_dim)
    probs[0] = 1.0
    return reps.kraus_from_environment(u, probs, n)


def random_hermitian_choi(n: int, rng, allow_negative: bool = True) -> reps.ChoiB:
    """Hermitian Choi candidate with trace ``n``; NCP when a drawn eigenvalue is negative."""
    rng = rng_from(rng)
    d = n * n
    low = -0.3 if allow_negative else 0.05
    lam = rng.uniform(low, 1.0, size=d)
    lam = lam * (n / lam.sum()) if lam.sum() > 0.1 else np.full(d, 1.0 / n)
    q = haar_unitary(d, rng)
    return reps.ChoiB(n, (q * lam) @ q.conj().T)
