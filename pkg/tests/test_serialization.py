import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from channelforge import dynamics as dyn
from channelforge import qubit, reps
from channelforge import serialization as ser
from channelforge.props import same_channel
from channelforge.randomize import random_cptp
from oracles import random_matrix

seeds = st.integers(0, 2**32 - 1)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_float_round_trips(x):
    s = ser.fmt_float(x)
    assert float(s) == x
    assert np.signbit(float(s)) == np.signbit(x)
    assert json.loads(s) == x


def test_fmt_float_rejects_non_finite():
    with pytest.raises(ValueError):
        ser.fmt_float(float("nan"))


def test_dumps_is_valid_json():
    obj = {"a": [1.5, -0.0, 2], "b": {"c": True, "d": None, "e": "x\"y"}, "f": [], "g": {}}
    text = ser.dumps(obj)
    back = json.loads(text)
    assert back["a"] == [1.5, 0.0, 2] and back["b"] == {"c": True, "d": None, "e": 'x"y'}
    assert ser.dumps(obj) == text


def _all_kinds(rng):
    k = random_cptp(2, 3, rng)
    return [
        k,
        reps.a_from_kraus(k),
        reps.b_from_kraus(k),
        reps.chi_from_kraus(k, "pauli"),
        reps.stinespring_from_kraus(k),
        reps.osd_from_b(qubit.pancake_ncp()),
        qubit.affine_from_channel(k),
    ]


def _arrays(ch):
    if isinstance(ch, reps.KrausSet):
        return list(ch.operators)
    if isinstance(ch, (reps.ChoiB, reps.SuperopA)):
        return [ch.matrix]
    if isinstance(ch, reps.ChiMatrix):
        return list(ch.basis) + [ch.matrix]
    if isinstance(ch, reps.StinespringModel):
        return [ch.unitary]
    if isinstance(ch, reps.OSD):
        return list(ch.positive_part) + list(ch.negative_part)
    return [ch.T, ch.t]


@given(seeds)
def test_channel_round_trip_bit_exact(seed):
    for ch in _all_kinds(np.random.default_rng(seed)):
        text = ser.channel_to_json(ch)
        back = ser.channel_from_json(text)
        assert type(back) is type(ch)
        for x, y in zip(_arrays(ch), _arrays(back)):
            assert np.array_equal(x, y)
        assert ser.channel_to_json(back) == text


def test_channel_json_schema():
    obj = json.loads(ser.channel_to_json(qubit.depolarizing(0.25)))
    assert obj["kind"] == "kraus" and obj["n"] == 2 and len(obj["operators"]) == 4
    m = obj["operators"][0]
    assert set(m) == {"rows", "cols", "re", "im"} and len(m["re"]) == 4


def test_chi_basis_by_name():
    k = random_cptp(2, 2, 3)
    c = reps.chi_from_kraus(k, "pauli")
    obj = ser.channel_to_obj(c)
    obj["basis"] = "pauli"
    assert same_channel(ser.channel_from_obj(obj), k)


def test_state_round_trip(rng):
    rho = random_matrix(3, 3, rng)
    assert np.array_equal(ser.state_from_json(ser.state_to_json(rho)), rho)
    bare = json.dumps(ser.matrix_to_obj(rho))
    assert np.array_equal(ser.state_from_json(bare), rho)


def test_generator_round_trip(rng):
    g = dyn.LindbladGenerator(2, np.diag([1.0, -1.0]), (random_matrix(2, 2, rng),))
    back = ser.generator_from_json(ser.generator_to_json(g))
    assert np.array_equal(back.hamiltonian, g.hamiltonian)
    assert np.array_equal(back.lindblads[0], g.lindblads[0])


def test_generator_rates():
    obj = ser.generator_to_obj(dyn.LindbladGenerator(2, np.zeros((2, 2)), (np.diag([1.0, -1.0]),)))
    obj["gamma-absorbed"] = False
    obj["gamma"] = [4.0]
    g = ser.generator_from_obj(obj)
    assert np.allclose(g.lindblads[0], 2 * np.diag([1, -1]))
    obj["gamma"] = [-1.0]
    with pytest.raises(ser.ParseError):
        ser.generator_from_obj(obj)


def test_trajectory_csv():
    g = dyn.LindbladGenerator(2, np.zeros((2, 2)), (np.diag([1.0, -1.0]),))
    traj = dyn.evolve(g, np.full((2, 2), 0.5), dyn.EvolutionConfig(1.0, 4))
    lines = ser.trajectory_to_csv(traj).splitlines()
    assert lines[0] == "t,re(rho00),im(rho00),re(rho01),im(rho01),re(rho10),im(rho10),re(rho11),im(rho11)"
    assert len(lines) == 6
    last = [float(x) for x in lines[-1].split(",")]
    assert last[0] == 1.0 and last[3] == traj.states[-1][0, 1].real


@pytest.mark.parametrize(
    "text",
    [
        "",
        "{",
        "[]",
        "3",
        '{"kind": "kraus"}',
        '{"kind": "banana", "n": 2}',
        '{"kind": "choi", "n": 2, "matrix": {"rows": 4, "cols": 4, "re": [1], "im": [0]}}',
        '{"kind": "choi", "n": true, "matrix": {}}',
        '{"kind": "kraus", "n": 2, "operators": []}',
        '{"kind": "kraus", "n": 2, "operators": [{"rows": 2, "cols": 2, "re": [NaN, 0, 0, 1], "im": [0, 0, 0, 0]}]}',
        '{"kind": "kraus", "n": 2, "operators": [{"rows": 2, "cols": 2, "re": [1e400, 0, 0, 1], "im": [0, 0, 0, 0]}]}',
        '{"kind": "kraus", "n": 2, "operators": [{"rows": 2, "cols": 2, "re": ["1", 0, 0, 1], "im": [0, 0, 0, 0]}]}',
        '{"kind": "stinespring", "n": 1, "env_dim": 1, "unitary": {"rows": 1, "cols": 1, "re": [2], "im": [0]}}',
        '{"kind": "chi", "n": 1, "basis": "pauli", "matrix": {"rows": 1, "cols": 1, "re": [1], "im": [0]}}',
        '{"kind": "affine-qubit", "n": 2, "T": {"rows": 3, "cols": 3, "re": [1,0,0,0,1,0,0,0,1], "im": [0,0,0,0,0,0,0,0,1]}, "t": [0,0,0]}',
        "[" * 100000,
    ],
)
def test_malformed_channels_raise_parse_error(text):
    with pytest.raises(ser.ParseError):
        ser.channel_from_json(text)
