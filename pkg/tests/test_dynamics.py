import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from channelforge import dynamics as dyn
from channelforge import props, qubit, reps
from channelforge.errors import DimensionError, InvalidStateError, NotHermitianError
from oracles import SX, SZ, kraus_apply, lindblad_superop_expm, random_density, random_hermitian, random_matrix

seeds = st.integers(0, 2**32 - 1)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def dephasing(gamma):
    return dyn.LindbladGenerator(2, np.zeros((2, 2)), (np.sqrt(gamma) * SZ,))


def decay(gamma):
    return dyn.LindbladGenerator(2, np.zeros((2, 2)), (np.sqrt(gamma) * LOWER,))


def random_generator(n, rng, k=2):
    return dyn.LindbladGenerator(n, random_hermitian(n, rng), tuple(random_matrix(n, n, rng) * 0.5 for _ in range(k)))


def test_generator_apply_examples():
    rho = random_density(2, np.random.default_rng(0))
    assert np.array_equal(dyn.generator_apply(dyn.LindbladGenerator.zero(2), rho), np.zeros((2, 2)))
    plus = np.full((2, 2), 0.5)
    g = dyn.LindbladGenerator(2, SZ)
    out = dyn.generator_apply(g, plus)
    assert np.allclose(out, -1j * (SZ @ plus - plus @ SZ))
    assert abs(np.trace(out)) < 1e-15
    r = 0.3 + 0.1j
    rho = np.array([[0.5, r], [np.conj(r), 0.5]])
    assert dyn.generator_apply(dephasing(0.7), rho)[0, 1] == pytest.approx(-2 * 0.7 * r)
    with pytest.raises(DimensionError):
        dyn.generator_apply(g, np.eye(3))


@given(seeds, st.integers(1, 4))
def test_generator_trace_and_hermiticity(seed, n):
    rng = np.random.default_rng(seed)
    g = random_generator(n, rng)
    rho = random_hermitian(n, rng)
    out = dyn.generator_apply(g, rho)
    assert abs(np.trace(out)) < 1e-12
    assert np.max(np.abs(out - out.conj().T)) < 1e-12


@given(seeds, st.integers(1, 3))
def test_generator_superop_matches_apply(seed, n):
    rng = np.random.default_rng(seed)
    g = random_generator(n, rng)
    rho = random_matrix(n, n, rng)
    via_sup = (dyn.generator_superop(g) @ rho.reshape(-1)).reshape(n, n)
    assert np.allclose(via_sup, dyn.generator_apply(g, rho), atol=1e-12)


def test_l0_examples():
    assert np.array_equal(dyn.l0_from_lindblads(dyn.LindbladGenerator.zero(2)), np.zeros((2, 2)))
    assert np.allclose(dyn.l0_from_lindblads(dephasing(0.8)), -0.4 * np.eye(2))
    assert np.allclose(dyn.l0_from_lindblads(decay(0.8)), -0.4 * np.diag([0, 1]))


def test_generator_validation():
    with pytest.raises(NotHermitianError):
        dyn.LindbladGenerator(2, np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionError):
        dyn.LindbladGenerator(2, np.eye(2), (np.eye(3),))
    with pytest.raises(ValueError):
        dyn.EvolutionConfig(1.0, 0)
    with pytest.raises(ValueError):
        dyn.EvolutionConfig(-1.0, 10)
    with pytest.raises(ValueError):
        dyn.EvolutionConfig(1.0, 10, "leapfrog")


def test_small_step_kraus():
    g = dyn.LindbladGenerator(2, 0.3 * SX, (np.sqrt(0.5) * SZ, 0.2 * LOWER))
    k = dyn.small_step_kraus(g, 1e-12)
    assert np.allclose(k.operators[0], np.eye(2), atol=1e-11)
    assert all(np.max(np.abs(d)) < 1e-6 for d in k.operators[1:])
    rho = random_density(2, np.random.default_rng(2))
    errs = []
    for dt in (1e-2, 5e-3):
        step = kraus_apply(dyn.small_step_kraus(g, dt).operators, rho)
        errs.append(np.max(np.abs(step - (rho + dyn.generator_apply(g, rho) * dt))))
    # O(dt^2): halving dt quarters the error
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)


def test_small_step_tp_defect():
    gamma, dt = 1.3, 1e-3
    defect, c = dyn.step_tp_defect(dephasing(gamma), dt)
    assert defect <= 4 * gamma**2 * dt**2
    assert c == pytest.approx(gamma**2 / 4, rel=1e-6)
    with pytest.raises(ValueError):
        dyn.small_step_kraus(dephasing(1), 0)


def test_evolve_zero_generator_constant():
    rho = random_density(3, np.random.default_rng(1))
    traj = dyn.evolve(dyn.LindbladGenerator.zero(3), rho, dyn.EvolutionConfig(1.0, 20))
    assert len(traj) == 21
    assert np.allclose(traj.states, rho[None], atol=1e-15)
    assert traj.times[0] == 0 and traj.times[-1] == 1.0


@pytest.mark.parametrize("gt", [0.25, 1.0, 2.0])
def test_evolve_dephasing_analytic(gt):
    gamma = 0.8
    t = gt / gamma
    plus = np.full((2, 2), 0.5, dtype=complex)
    traj = dyn.evolve(dephasing(gamma), plus, dyn.EvolutionConfig(t, 1000, "rk4"))
    expected = 0.5 * np.exp(-2 * gamma * traj.times)
    assert np.max(np.abs(traj.states[:, 0, 1] - expected)) < 1e-6
    assert traj.max_trace_drift() < 1e-12


def test_evolve_decay_population():
    gamma = 1.5
    traj = dyn.evolve(decay(gamma), np.diag([0, 1.0]), dyn.EvolutionConfig(2.0, 1000))
    assert np.max(np.abs(traj.states[:, 1, 1].real - np.exp(-gamma * traj.times))) < 1e-8


@pytest.mark.parametrize("scheme", dyn.SCHEMES)
def test_evolve_schemes_stay_valid(scheme):
    rng = np.random.default_rng(7)
    g = random_generator(3, rng)
    cfg = dyn.EvolutionConfig(1.0, 2000, scheme)
    traj = dyn.evolve(g, random_density(3, rng), cfg)
    assert traj.is_finite()
    if scheme == "kraus-step":
        # each step leaks at most n * defect of trace
        defect, _ = dyn.step_tp_defect(g, cfg.dt)
        assert traj.max_trace_drift() <= cfg.steps * 3 * defect
    else:
        assert traj.max_trace_drift() < 1e-12
    for rho in traj.states[1:]:
        assert np.array_equal(rho, rho.conj().T)


def test_evolve_rejects_bad_state():
    g = dephasing(1)
    cfg = dyn.EvolutionConfig(1.0, 10)
    with pytest.raises(InvalidStateError):
        dyn.evolve(g, np.eye(2), cfg)
    with pytest.raises(InvalidStateError):
        dyn.evolve(g, np.diag([1.5, -0.5]), cfg)
    with pytest.raises(InvalidStateError):
        dyn.evolve(g, np.array([[0.5, 1], [0, 0.5]]), cfg)
    with pytest.raises(DimensionError):
        dyn.evolve(g, np.eye(3) / 3, cfg)


def test_evolve_stiff_euler_drifts():
    traj = dyn.evolve(decay(3000.0), np.diag([0, 1.0]), dyn.EvolutionConfig(1.0, 10, "euler"))
    assert traj.max_trace_drift() > 1e-3


def test_channel_from_generator_zero():
    ch = dyn.channel_from_generator(dyn.LindbladGenerator.zero(2), 1.0, 10)
    assert props.same_channel(ch, qubit.identity(), 1e-14)


@pytest.mark.parametrize("gt", [0.1, 0.5, 1.0, 2.0])
def test_channel_from_generator_dephasing(gt):
    gamma = 1.0
    ch = dyn.channel_from_generator(dephasing(gamma), gt / gamma, 10_000)
    assert props.choi_distance(ch, qubit.phase_damping(1 - np.exp(-2 * gt))) <= 1e-5


@pytest.mark.parametrize("steps", [1, 10, 100, 1000])
def test_kraus_step_channel_is_cp(steps):
    ch = dyn.channel_from_generator(decay(2.0), 1.0, steps, scheme="kraus-step")
    assert props.check_cp(ch).value >= -1e-6


def test_kraus_step_converges_first_order():
    g, t = dephasing(1.0), 1.0
    target = qubit.phase_damping(1 - np.exp(-2 * t))
    e1 = props.choi_distance(dyn.channel_from_generator(g, t, 1000, "kraus-step"), target)
    e2 = props.choi_distance(dyn.channel_from_generator(g, t, 2000, "kraus-step"), target)
    assert e1 / e2 == pytest.approx(2, rel=0.5)


@pytest.mark.parametrize("scheme,ratio", [("euler", 2.0), ("rk4", 16.0)])
def test_convergence_order(scheme, ratio):
    rng = np.random.default_rng(11)
    h, ls = random_hermitian(2, rng), [random_matrix(2, 2, rng) * 0.6]
    g = dyn.LindbladGenerator(2, h, tuple(ls))
    t = 1.0
    exact = reps.SuperopA(2, lindblad_superop_expm(h, ls, t))
    base = 40 if scheme == "rk4" else 400
    e1 = props.choi_distance(dyn.channel_from_generator(g, t, base, scheme), exact)
    e2 = props.choi_distance(dyn.channel_from_generator(g, t, 2 * base, scheme), exact)
    assert ratio / 1.5 <= e1 / e2 <= ratio * 1.5


@given(seeds)
def test_rk4_channel_matches_expm(seed):
    rng = np.random.default_rng(seed)
    h, ls = random_hermitian(2, rng), [random_matrix(2, 2, rng) * 0.5]
    g = dyn.LindbladGenerator(2, h, tuple(ls))
    exact = lindblad_superop_expm(h, ls, 0.7)
    got = dyn.channel_from_generator(g, 0.7, 2000).matrix
    assert np.max(np.abs(got - exact)) < 1e-9


def test_channel_from_generator_errors():
    with pytest.raises(ValueError):
        dyn.channel_from_generator(dephasing(1), 0, 10)
    with pytest.raises(ValueError):
        dyn.channel_from_generator(dephasing(1), 1, 0)
