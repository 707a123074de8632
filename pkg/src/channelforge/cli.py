"""``channelforge`` command-line interface.

Exit codes: 0 success, 1 validation failed (or a refused conversion),
2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import dynamics, props, qubit, reps
from . import serialization as ser
from .errors import ChannelError, NotCPError, NotTPError, NumericalError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

TRACE_DRIFT_LIMIT = 1e-3
SEED_ENV = "CHANNELFORGE_SEED"
TARGETS = ("kraus", "choi", "superop", "chi", "stinespring", "osd")
ZOO_NAMES = tuple(sorted(set(qubit.ZOO) | {"unitary"}))


class InputError(Exception):
    pass


def _warn(msg):
    print(f"channelforge: {msg}", file=sys.stderr)


def _read_text(path) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, "rb") as fh:
            return fh.read().decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load(path, parser):
    text = _read_text(path)
    try:
        return parser(text)
    except ChannelError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except Exception as exc:  # malformed input must never crash the CLI
        raise InputError(f"{path}: unreadable input ({type(exc).__name__}: {exc})") from exc


def _emit(text, out=None):
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be a non-negative integer, got {raw!r}") from None
    if seed < 0:
        raise InputError(f"{SEED_ENV} must be a non-negative integer, got {raw!r}")
    return seed


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    ch = _load(args.file, ser.channel_from_json)
    report = props.validate(ch, args.tol)
    sys.stdout.write(ser.dumps(report.to_dict()) + "\n")
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_props(args) -> int:
    ch = _load(args.file, ser.channel_from_json)
    report = props.validate(ch, args.tol)
    out = report.to_dict()
    out["choi_eigenvalues"] = [float(x) for x in props.choi_eigenvalues(ch)]
    if ch.n == 2 and report.hermiticity_preserving and report.trace_preserving:
        aff = qubit.affine_from_channel(ch, args.tol)
        out["affine"] = {"T": [[float(x) for x in row] for row in aff.T], "t": [float(x) for x in aff.t]}
    sys.stdout.write(ser.dumps(out) + "\n")
    return EXIT_OK


def cmd_convert(args) -> int:
    ch = _load(args.file, ser.channel_from_json)
    try:
        b = reps.to_choi(ch)
        if args.to == "choi":
            res = b
        elif args.to == "superop":
            res = reps.to_superop(ch)
        elif args.to == "kraus":
            res = reps.kraus_from_b(b, args.tol)
        elif args.to == "chi":
            res = reps.chi_from_b(b, args.basis)
        elif args.to == "stinespring":
            res = reps.stinespring_from_kraus(reps.kraus_from_b(b, args.tol), args.tol)
        else:
            res = reps.osd_from_b(b)
    except NotCPError as exc:
        _warn(f"{exc}; try --to osd")
        return EXIT_INVALID
    except NotTPError as exc:
        _warn(f"{exc}; a Stinespring unitary needs a trace-preserving channel")
        return EXIT_INVALID
    except ChannelError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(ser.channel_to_json(res))
    return EXIT_OK


def cmd_apply(args) -> int:
    ch = _load(args.channel, ser.channel_from_json)
    rho = _load(args.state, ser.state_from_json)
    try:
        out = reps.apply(ch, rho)
    except ChannelError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(ser.state_to_json(out))
    tr = np.trace(out)
    _warn(f"output trace {tr.real:.17g}{'' if tr.imag == 0 else f' {tr.imag:+.3g}i'}")
    lam_min = float(np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0])
    if lam_min < -args.tol:
        _warn(f"warning: output is not positive semidefinite (min eigenvalue {lam_min:.17g})")
    return EXIT_OK


def cmd_bloch_image(args) -> int:
    ch = _load(args.file, ser.channel_from_json)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.samples < 1:
        raise InputError("--samples must be positive")
    try:
        img = qubit.bloch_image_sample(ch, args.samples, seed, args.mode)
    except ChannelError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(img.to_csv())
    c = img.centroid
    _warn(f"max radius {img.max_radius:.17g} centroid ({c[0]:.17g}, {c[1]:.17g}, {c[2]:.17g})")
    return EXIT_OK


def cmd_lindblad(args) -> int:
    g = _load(args.file, ser.generator_from_json)
    if not (np.isfinite(args.t) and args.t > 0):
        raise InputError("--t must be a positive number")
    if args.steps is not None and args.steps < 1:
        raise InputError("--steps must be positive")
    if args.emit_channel:
        steps = args.steps or 10_000
        with np.errstate(all="ignore"):
            a = dynamics.channel_from_generator(g, args.t, steps, args.scheme)
        if not np.all(np.isfinite(a.matrix)):
            _warn("numerical failure: propagator is not finite")
            return EXIT_NUMERICAL
        drift = props.tp_deviation(a)
        if drift > TRACE_DRIFT_LIMIT:
            _warn(f"numerical failure: trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:g}")
            return EXIT_NUMERICAL
        sys.stdout.write(ser.channel_to_json(a))
        return EXIT_OK
    if args.state:
        rho0 = _load(args.state, ser.state_from_json)
    else:
        rho0 = np.zeros((g.n, g.n))
        rho0[0, 0] = 1.0
    cfg = dynamics.EvolutionConfig(args.t, args.steps or 1000, args.scheme)
    try:
        traj = dynamics.evolve(g, rho0, cfg)
    except ChannelError as exc:
        raise InputError(str(exc)) from exc
    if not traj.is_finite():
        _warn("numerical failure: trajectory is not finite")
        return EXIT_NUMERICAL
    drift = traj.max_trace_drift()
    if drift > TRACE_DRIFT_LIMIT:
        _warn(f"numerical failure: trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:g}")
        return EXIT_NUMERICAL
    sys.stdout.write(ser.trajectory_to_csv(traj))
    return EXIT_OK


def cmd_zoo(args) -> int:
    try:
        if args.name == "unitary":
            ch = qubit.unitary_channel(qubit.rotation(args.axis, args.angle))
        elif args.name in qubit.PARAMETRIZED:
            if args.p is None:
                raise InputError(f"{args.name} needs --p")
            ch = qubit.ZOO[args.name](args.p)
        else:
            if args.p is not None:
                _warn(f"--p is ignored for {args.name}")
            ch = qubit.ZOO[args.name]()
    except (ChannelError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    _emit(ser.channel_to_json(ch), args.out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _finite_float(s):
    x = float(s)
    if not np.isfinite(x):
        raise argparse.ArgumentTypeError(f"{s!r} is not a finite number")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="channelforge", description="Quantum channel toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check HP, TP, CP and unitality")
    s.add_argument("file")
    s.add_argument("--tol", type=_finite_float, default=props.PSD_TOL)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("props", help="validation report plus Choi spectrum and qubit affine form")
    s.add_argument("file")
    s.add_argument("--tol", type=_finite_float, default=props.PSD_TOL)
    s.set_defaults(func=cmd_props)

    s = sub.add_parser("convert", help="convert between representations")
    s.add_argument("file")
    s.add_argument("--to", choices=TARGETS, required=True)
    s.add_argument("--basis", choices=("standard", "pauli"), default="standard")
    s.add_argument("--tol", type=_finite_float, default=props.PSD_TOL)
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("apply", help="apply a channel to a state")
    s.add_argument("channel")
    s.add_argument("state")
    s.add_argument("--tol", type=_finite_float, default=props.PSD_TOL)
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("bloch-image", help="sample the image of the Bloch ball as CSV")
    s.add_argument("file")
    s.add_argument("--samples", type=int, default=2048)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--mode", choices=("surface", "ball"), default="surface")
    s.set_defaults(func=cmd_bloch_image)

    s = sub.add_parser("lindblad", help="integrate a Lindblad generator")
    s.add_argument("file")
    s.add_argument("--t", type=_finite_float, required=True)
    s.add_argument("--steps", type=int, default=None)
    s.add_argument("--scheme", choices=dynamics.SCHEMES, default="rk4")
    s.add_argument("--state", default=None, help="initial state JSON (default |0><0|)")
    s.add_argument("--emit-channel", action="store_true")
    s.set_defaults(func=cmd_lindblad)

    s = sub.add_parser("zoo", help="emit a standard qubit channel")
    s.add_argument("name", choices=ZOO_NAMES)
    s.add_argument("--p", type=_finite_float, default=None)
    s.add_argument("--axis", choices=("x", "y", "z"), default="x")
    s.add_argument("--angle", type=_finite_float, default=float(np.pi / 2))
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_zoo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        _warn(f"error: {exc}")
        return EXIT_INPUT
    except NumericalError as exc:
        _warn(f"numerical failure: {exc}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
