"""JSON and CSV formats for channels, states and generators.

Matrices are ``{"rows": r, "cols": c, "re": [...], "im": [...]}`` in
row-major order. Floats are written with 17 significant digits, which
round-trips every binary64 value exactly.
"""
from __future__ import annotations

import io
import json
import math

import numpy as np

from . import reps
from .dynamics import LindbladGenerator, Trajectory
from .errors import ChannelError
from .qubit import AffineQubit

MAX_DIM = 8  # largest system dimension accepted from files
KINDS = ("kraus", "choi", "superop", "chi", "stinespring", "osd", "affine-qubit")


class ParseError(ChannelError):
    """Input document is malformed or does not describe a valid object."""


def fmt_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    if s == "-0":
        s = "-0.0"
    return s


# -- writer -----------------------------------------------------------------


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (bool, int, float, str, np.integer, np.floating))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-digit floats; lists of scalars stay on one line."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(_is_scalar(v) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


# -- matrices ---------------------------------------------------------------


def matrix_to_obj(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array")
    flat = m.ravel()
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def _int(v, what, lo=0, hi=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{what} must be an integer")
    if v < lo or (hi is not None and v > hi):
        raise ParseError(f"{what} = {v} out of range")
    return v


def _numbers(v, what, length=None) -> list:
    if not isinstance(v, list):
        raise ParseError(f"{what} must be a list of numbers")
    if length is not None and len(v) != length:
        raise ParseError(f"{what} has {len(v)} entries, expected {length}")
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ParseError(f"{what} contains a non-number")
        if not math.isfinite(x):
            raise ParseError(f"{what} contains a non-finite number")
    return [float(x) for x in v]


def _field(obj, key, what):
    if not isinstance(obj, dict):
        raise ParseError(f"{what} must be a JSON object")
    if key not in obj:
        raise ParseError(f"{what} is missing {key!r}")
    return obj[key]


def matrix_from_obj(obj, what="matrix", shape=None) -> np.ndarray:
    limit = MAX_DIM * MAX_DIM * MAX_DIM
    r = _int(_field(obj, "rows", what), f"{what}.rows", 1, limit)
    c = _int(_field(obj, "cols", what), f"{what}.cols", 1, limit)
    if r * c > limit * MAX_DIM:
        raise ParseError(f"{what} is too large")
    re = _numbers(_field(obj, "re", what), f"{what}.re", r * c)
    im = _numbers(_field(obj, "im", what), f"{what}.im", r * c)
    m = (np.array(re) + 1j * np.array(im)).reshape(r, c)
    if shape is not None and m.shape != tuple(shape):
        raise ParseError(f"{what} must be {shape[0]}x{shape[1]}, got {r}x{c}")
    return m


def _matrix_list(v, what, shape) -> list:
    if not isinstance(v, list):
        raise ParseError(f"{what} must be a list of matrices")
    if len(v) > 4 * MAX_DIM**4:
        raise ParseError(f"{what} has too many entries")
    return [matrix_from_obj(m, f"{what}[{i}]", shape) for i, m in enumerate(v)]


# -- channels ---------------------------------------------------------------


def channel_to_obj(ch) -> dict:
    if isinstance(ch, reps.KrausSet):
        return {"kind": "kraus", "n": ch.n, "operators": [matrix_to_obj(d) for d in ch.operators]}
    if isinstance(ch, reps.ChoiB):
        return {"kind": "choi", "n": ch.n, "matrix": matrix_to_obj(ch.matrix)}
    if isinstance(ch, reps.SuperopA):
        return {"kind": "superop", "n": ch.n, "matrix": matrix_to_obj(ch.matrix)}
    if isinstance(ch, reps.ChiMatrix):
        return {
            "kind": "chi",
            "n": ch.n,
            "basis": [matrix_to_obj(a) for a in ch.basis],
            "matrix": matrix_to_obj(ch.matrix),
        }
    if isinstance(ch, reps.StinespringModel):
        return {
            "kind": "stinespring",
            "n": ch.n,
            "env_dim": ch.env_dim,
            "env_state_index": ch.env_state_index,
            "unitary": matrix_to_obj(ch.unitary),
        }
    if isinstance(ch, reps.OSD):
        return {
            "kind": "osd",
            "n": ch.n,
            "positive": [matrix_to_obj(d) for d in ch.positive_part],
            "negative": [matrix_to_obj(f) for f in ch.negative_part],
        }
    if isinstance(ch, AffineQubit):
        return {"kind": "affine-qubit", "n": 2, "T": matrix_to_obj(ch.T), "t": [float(x) for x in ch.t]}
    raise TypeError(f"not a channel representation: {type(ch).__name__}")


def channel_from_obj(obj):
    """Build a channel from a parsed JSON document; any defect raises :class:`ParseError`."""
    kind = _field(obj, "kind", "channel")
    if kind not in KINDS:
        raise ParseError(f"unknown channel kind {kind!r}")
    n = _int(_field(obj, "n", "channel"), "n", 1, MAX_DIM)
    sq = (n, n)
    big = (n * n, n * n)
    try:
        if kind == "kraus":
            return reps.KrausSet(n, _matrix_list(_field(obj, "operators", "kraus"), "operators", sq))
        if kind == "choi":
            return reps.ChoiB(n, matrix_from_obj(_field(obj, "matrix", "choi"), "matrix", big))
        if kind == "superop":
            return reps.SuperopA(n, matrix_from_obj(_field(obj, "matrix", "superop"), "matrix", big))
        if kind == "chi":
            basis = obj.get("basis", "standard")
            if isinstance(basis, str):
                basis = reps.resolve_basis(basis, n)
            else:
                basis = _matrix_list(basis, "basis", sq)
            return reps.ChiMatrix(n, basis, matrix_from_obj(_field(obj, "matrix", "chi"), "matrix", big))
        if kind == "stinespring":
            m = _int(_field(obj, "env_dim", "stinespring"), "env_dim", 1, MAX_DIM * MAX_DIM)
            idx = _int(obj.get("env_state_index", 0), "env_state_index", 0, m - 1)
            u = matrix_from_obj(_field(obj, "unitary", "stinespring"), "unitary", (n * m, n * m))
            return reps.StinespringModel(n, m, u, idx)
        if kind == "osd":
            pos = _matrix_list(obj.get("positive", []), "positive", sq)
            neg = _matrix_list(obj.get("negative", []), "negative", sq)
            return reps.OSD(n, pos, neg)
        # affine-qubit
        if n != 2:
            raise ParseError("affine-qubit channels have n = 2")
        T = matrix_from_obj(_field(obj, "T", "affine-qubit"), "T", (3, 3))
        if np.any(T.imag != 0):
            raise ParseError("T must be real")
        t = _numbers(_field(obj, "t", "affine-qubit"), "t", 3)
        return AffineQubit(T.real, t)
    except ParseError:
        raise
    except (ChannelError, ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def loads_json(text: str):
    def reject(const):
        raise ParseError(f"non-finite number {const} in input")

    try:
        return json.loads(text, parse_constant=reject)
    except ParseError:
        raise
    except (ValueError, RecursionError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def channel_to_json(ch) -> str:
    return dumps(channel_to_obj(ch)) + "\n"


def channel_from_json(text: str):
    return channel_from_obj(loads_json(text))


# -- states -----------------------------------------------------------------


def state_to_obj(rho) -> dict:
    rho = np.asarray(rho)
    return {"kind": "state", "n": int(rho.shape[0]), "rho": matrix_to_obj(rho)}


def state_from_obj(obj) -> np.ndarray:
    """Accepts ``{"kind": "state", "n": .., "rho": matrix}`` or a bare matrix object."""
    if isinstance(obj, dict) and "rho" in obj:
        rho = matrix_from_obj(obj["rho"], "rho")
        if "n" in obj and _int(obj["n"], "n", 1, MAX_DIM) != rho.shape[0]:
            raise ParseError("state 'n' disagrees with the matrix size")
    else:
        rho = matrix_from_obj(obj, "state")
    if rho.shape[0] != rho.shape[1] or rho.shape[0] > MAX_DIM:
        raise ParseError(f"state must be square with n <= {MAX_DIM}, got {rho.shape}")
    return rho


def state_to_json(rho) -> str:
    return dumps(state_to_obj(rho)) + "\n"


def state_from_json(text: str) -> np.ndarray:
    return state_from_obj(loads_json(text))


# -- generators and trajectories -------------------------------------------


def generator_to_obj(g: LindbladGenerator) -> dict:
    return {
        "n": g.n,
        "H": matrix_to_obj(g.hamiltonian),
        "L": [matrix_to_obj(op) for op in g.lindblads],
        "gamma-absorbed": True,
    }


def generator_from_obj(obj) -> LindbladGenerator:
    """Rates are folded into the operators when ``gamma-absorbed`` is true (the
    default); otherwise ``gamma`` lists one non-negative rate per operator."""
    n = _int(_field(obj, "n", "generator"), "n", 1, MAX_DIM)
    h = matrix_from_obj(_field(obj, "H", "generator"), "H", (n, n))
    ls = _matrix_list(obj.get("L", []), "L", (n, n))
    absorbed = obj.get("gamma-absorbed", True)
    if not isinstance(absorbed, bool):
        raise ParseError("'gamma-absorbed' must be a boolean")
    if not absorbed:
        rates = _numbers(_field(obj, "gamma", "generator"), "gamma", len(ls))
        if any(r < 0 for r in rates):
            raise ParseError("rates must be non-negative")
        ls = [np.sqrt(r) * op for r, op in zip(rates, ls)]
    try:
        return LindbladGenerator(n, h, tuple(ls))
    except (ChannelError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def generator_to_json(g: LindbladGenerator) -> str:
    return dumps(generator_to_obj(g)) + "\n"


def generator_from_json(text: str) -> LindbladGenerator:
    return generator_from_obj(loads_json(text))


def trajectory_csv_header(n: int) -> list:
    cols = ["t"]
    for i in range(n):
        for j in range(n):
            cols += [f"re(rho{i}{j})", f"im(rho{i}{j})"]
    return cols


def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    buf = io.StringIO()
    buf.write(",".join(trajectory_csv_header(n)) + "\n")
    for t, rho in traj:
        row = [fmt_float(t)]
        for z in rho.ravel():
            row += [fmt_float(z.real), fmt_float(z.imag)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
