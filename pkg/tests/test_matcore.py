import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from channelforge import matcore as mc
from channelforge.errors import DimensionError, NotHermitianError
from oracles import SX, SY, SZ, ptrace_loop, random_hermitian, random_matrix, vec_loop

seeds = st.integers(0, 2**32 - 1)


def test_vec_examples():
    assert np.array_equal(mc.vec(np.eye(2)).ravel(), [1, 0, 0, 1])
    assert np.array_equal(mc.vec(SX).ravel(), [0, 1, 1, 0])
    z = np.arange(6).reshape(2, 3)
    assert np.array_equal(mc.vec(z).ravel(), [0, 1, 2, 3, 4, 5])
    assert mc.vec(z).shape == (6, 1)


def test_mat_examples():
    assert np.array_equal(mc.mat([1, 0, 0, 1], 2), np.eye(2))
    assert np.array_equal(mc.mat([0, 1, 1, 0], 2), SX)
    with pytest.raises(DimensionError):
        mc.mat(np.ones(5), 2)


@given(seeds, st.integers(1, 6))
def test_vec_mat_round_trip_exact(seed, n):
    z = random_matrix(n, n, np.random.default_rng(seed))
    assert np.array_equal(mc.mat(mc.vec(z), n), z)
    assert np.array_equal(mc.vec(z), vec_loop(z))


@given(seeds, st.sampled_from([2, 3]))
def test_kron_action_identity(seed, n):
    rng = np.random.default_rng(seed)
    x, y, z = (random_matrix(n, n, rng) for _ in range(3))
    lhs = mc.kron(x, y) @ mc.vec(z)
    assert np.allclose(lhs, mc.vec(x @ z @ y.T), atol=1e-12, rtol=0)


@given(seeds, st.integers(1, 4))
def test_vec_from_identity(seed, n):
    z = random_matrix(n, n, np.random.default_rng(seed))
    assert np.allclose(mc.kron(z, np.eye(n)) @ mc.vec(np.eye(n)), mc.vec(z), atol=1e-12, rtol=0)


def test_reshuffle_identity_superop():
    i_vec = mc.vec(np.eye(2))
    assert np.array_equal(mc.reshuffle(np.eye(4), 2), i_vec @ i_vec.T)


def test_reshuffle_colored_fold():
    # rows of A become 2x2 blocks of B
    a = np.arange(16).reshape(4, 4)
    b = mc.reshuffle(a)
    for ip in range(2):
        for jp in range(2):
            row = a[ip * 2 + jp]
            for i in range(2):
                for j in range(2):
                    assert b[ip * 2 + i, jp * 2 + j] == row[i * 2 + j]


@given(seeds, st.integers(1, 4))
def test_reshuffle_involution(seed, n):
    m = random_matrix(n * n, n * n, np.random.default_rng(seed))
    assert np.array_equal(mc.reshuffle(mc.reshuffle(m, n), n), m)


@given(seeds)
def test_reshuffle_of_hermiticity_preserving_is_hermitian(seed):
    rng = np.random.default_rng(seed)
    ds = [random_matrix(2, 2, rng) for _ in range(3)]
    w = [1.0, -0.7, 0.3]
    a = sum(c * np.kron(d, d.conj()) for c, d in zip(w, ds))
    assert mc.hermiticity_deviation(mc.reshuffle(a)) < 1e-12


def test_reshuffle_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        mc.reshuffle(np.ones((3, 3)))
    with pytest.raises(DimensionError):
        mc.reshuffle(np.ones((4, 5)))


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_matches_loops(seed, d1, d2):
    m = random_matrix(d1 * d2, d1 * d2, np.random.default_rng(seed))
    for which in ("first", "second"):
        assert np.allclose(mc.partial_trace(m, d1, d2, which), ptrace_loop(m, d1, d2, which), atol=1e-12)


@given(seeds)
def test_partial_trace_vec_identities(seed):
    rng = np.random.default_rng(seed)
    x, y = random_matrix(2, 2, rng), random_matrix(2, 2, rng)
    outer = mc.vec(x) @ mc.vec(y).conj().T
    assert np.allclose(mc.partial_trace(outer, 2, 2, "second"), x @ y.conj().T, atol=1e-12)
    assert np.allclose(mc.partial_trace(outer, 2, 2, "first"), x.T @ y.conj(), atol=1e-12)


def test_partial_trace_product_state(rng):
    ra, rb = random_hermitian(2, rng), random_hermitian(3, rng)
    assert np.allclose(mc.partial_trace(np.kron(ra, rb), 2, 3, "second"), ra * np.trace(rb))
    with pytest.raises(DimensionError):
        mc.partial_trace(np.eye(5), 2, 3)
    with pytest.raises(ValueError):
        mc.partial_trace(np.eye(4), 2, 2, "middle")


def test_bell_projector():
    i_vec = mc.vec(np.eye(2))
    proj = i_vec @ i_vec.T
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(proj, 2 * np.outer(phi, phi))
    assert np.linalg.matrix_rank(proj) == 1
    assert np.trace(proj) == 2


def test_eig_examples():
    e = mc.hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(e.eigenvalues, [3, 2, 1], atol=1e-14)
    b_proj = np.array([[0.5, 0, 0, 1], [0, 0.5, 0, 0], [0, 0, 0.5, 0], [1, 0, 0, 0.5]])
    assert np.allclose(mc.hermitian_eig(b_proj).eigenvalues, [1.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_eig_two_by_two_vs_characteristic_polynomial(rng):
    for _ in range(20):
        h = random_hermitian(2, rng)
        a, d, b = h[0, 0].real, h[1, 1].real, abs(h[0, 1])
        disc = np.sqrt(((a - d) / 2) ** 2 + b**2)
        roots = [(a + d) / 2 + disc, (a + d) / 2 - disc]
        assert np.allclose(mc.hermitian_eig(h).eigenvalues, roots, atol=1e-12)


@given(seeds, st.integers(1, 16))
def test_eig_properties(seed, n):
    h = random_hermitian(n, np.random.default_rng(seed))
    e = mc.hermitian_eig(h)
    v = e.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.allclose(e.reconstruct(), h, atol=1e-10)
    assert abs(e.eigenvalues.sum() - np.trace(h).real) < 1e-10
    assert np.all(np.diff(e.eigenvalues) <= 0)
    assert np.allclose(e.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
    assert e.residual < 1e-10


def test_eig_phase_convention(rng):
    e = mc.hermitian_eig(random_hermitian(5, rng))
    for k in range(5):
        col = e.eigenvectors[:, k]
        first = col[np.flatnonzero(np.abs(col) > 1e-10)[0]]
        assert abs(first.imag) < 1e-15 and first.real > 0


def test_eig_deterministic(rng):
    h = random_hermitian(6, rng)
    e1, e2 = mc.hermitian_eig(h), mc.hermitian_eig(h)
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)


def test_eig_degenerate():
    e = mc.hermitian_eig(np.eye(4))
    assert np.array_equal(e.eigenvalues, np.ones(4))
    assert np.allclose(e.eigenvectors, np.eye(4))


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError) as info:
        mc.hermitian_eig(np.array([[0, 1], [0, 0]]))
    assert info.value.deviation == 1.0
    # within tolerance is accepted
    mc.hermitian_eig(np.array([[0, 1 + 1e-12], [1, 0]]))


def test_small_helpers():
    assert np.array_equal(mc.adjoint(SY), SY)
    assert mc.frobenius_distance(SZ, SZ) == 0
    assert np.array_equal(mc.matmul(SX, SX), np.eye(2))
    assert np.array_equal(mc.add(SX, SZ), SX + SZ)
    assert np.array_equal(mc.scale(SX, 2j), 2j * SX)
    assert mc.frobenius_distance(np.eye(2), np.zeros((2, 2))) == pytest.approx(np.sqrt(2))
    for bad in (lambda: mc.matmul(np.eye(2), np.eye(3)), lambda: mc.add(np.eye(2), np.eye(3))):
        with pytest.raises(DimensionError):
            bad()
