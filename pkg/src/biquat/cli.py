"""Command-line interface: ``biquat verify|transform|solve|spinor``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .algebra import Biquaternion
from .diffops import DEFAULT_FD_STEP, BqField, bigradient, gradiental_apply
from .errors import BiquatError, ParseError, ZeroWaveNumber
from .physics import XiSpinor, elementary_omega_spinor, elementary_xi_spinor
from .quadrature import QuadratureSpec
from .sources import source_from_obj
from .transforms import (
    Boost,
    PoincareOp,
    Rotor,
    SpacetimePoint,
    apply_boost,
    apply_poincare,
    apply_rotation,
)
from . import waves as wv

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

BQ_COLUMNS = ["tau", "x1", "x2", "x3", "s_re", "s_im",
              "v1_re", "v1_im", "v2_re", "v2_im", "v3_re", "v3_im"]
SOLVE_KINDS = ("biwave", "maxwell", "md", "harmonic", "static")


class InputError(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _bq_cells(p: np.ndarray, B: Biquaternion) -> list[str]:
    cells = [_fmt(v) for v in p]
    for z in B.components:
        cells += [_fmt(z.real), _fmt(z.imag)]
    return cells


def _threads() -> int:
    raw = os.environ.get("BIWAVE_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"BIWAVE_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _ordered_map(fn, items):
    """Map preserving input order; BIWAVE_THREADS caps the worker count."""
    items = list(items)
    workers = min(_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(obj, dict):
        raise InputError("config must be a JSON object")
    return obj


def _complex(v, name) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f'"{name}" must be a number or a [re, im] pair')


def _points(cfg: dict) -> np.ndarray:
    """Evaluation points from "points" or a tensor "grid" (tau slowest, x3 fastest)."""
    if "points" in cfg:
        pts = np.asarray(cfg["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise InputError('"points" must be a list of [tau, x1, x2, x3]')
        return pts
    if "grid" in cfg:
        g = cfg["grid"]
        axes = [np.atleast_1d(np.asarray(g.get(k, [0.0]), dtype=float)) for k in ("tau", "x1", "x2", "x3")]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)
    raise InputError('config needs "points" or "grid"')


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    report = verify_mod.run([args.suite], args.n, args.seed, args.tol)
    text = verify_mod.dumps(report)
    out, close = _open_out(args.out)
    try:
        out.write(text)
    finally:
        if close:
            out.close()
    if not report["pass"]:
        print("verification failed: " + ", ".join(report["failed"]), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --------------------------------------------------------------------------
# transform
# --------------------------------------------------------------------------

def _axis(obj, where):
    e = obj.get("e")
    if not isinstance(e, list) or len(e) != 3:
        raise InputError(f'{where}: "e" must be a list of 3 numbers')
    return np.asarray(e, float)


def _transform_from_config(cfg: dict):
    steps = []
    if "poincare" in cfg:
        p = cfg["poincare"]
        P = PoincareOp(float(p.get("phi", 0.0)), float(p.get("theta", 0.0)), _axis(p, "poincare"))
        steps.append(lambda Z, inv: apply_poincare(P, Z, inverse=inv))
    else:
        if "boost" in cfg:
            b = cfg["boost"]
            e = _axis(b, "boost")
            L = Boost.from_velocity(float(b["v"]), e) if "v" in b else Boost(float(b.get("theta", 0.0)), e)
            steps.append(lambda Z, inv: apply_boost(Boost(-L.theta, L.e) if inv else L, Z))
        if "rotor" in cfg:
            r = cfg["rotor"]
            U = Rotor(float(r.get("phi", 0.0)), _axis(r, "rotor"))
            steps.append(lambda Z, inv: apply_rotation(Rotor(-U.phi, U.e) if inv else U, Z))
    inverse = bool(cfg.get("inverse", False))
    if inverse:
        steps = steps[::-1]

    def apply(Z):
        for step in steps:
            Z = step(Z, inverse)
        return Z

    return apply


def _read_points(stream) -> list[tuple[int, SpacetimePoint]]:
    pts = []
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict) or set(obj) != {"tau", "x"}:
                raise ValueError('record must have exactly the keys "tau" and "x"')
            x = obj["x"]
            if not isinstance(x, list) or len(x) != 3:
                raise ValueError('"x" must be a list of 3 numbers')
            pts.append((lineno, SpacetimePoint(float(obj["tau"]), np.asarray(x, float))))
        except (ValueError, TypeError) as exc:
            raise ParseError(str(exc), lineno) from None
    return pts


def cmd_transform(args) -> int:
    cfg = _load_json(args.config) if args.config else {}
    apply = _transform_from_config(cfg)
    if args.input and args.input != "-":
        try:
            with open(args.input) as fh:
                pts = _read_points(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from None
    else:
        pts = _read_points(sys.stdin)
    rows = _ordered_map(lambda item: (item[1], apply(item[1])), pts)
    out, close = _open_out(args.out)
    try:
        out.write("tau,x1,x2,x3,pseudonorm2_before,pseudonorm2_after\n")
        for before, after in rows:
            cells = [_fmt(v) for v in after.as_array()]
            cells += [_fmt(before.pseudonorm2()), _fmt(after.pseudonorm2())]
            out.write(",".join(cells) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


# --------------------------------------------------------------------------
# solve
# --------------------------------------------------------------------------

def _solver(cfg: dict, q: QuadratureSpec, h: float, base_dir: Path):
    kind = cfg.get("kind")
    if kind not in SOLVE_KINDS:
        raise InputError(f'"kind" must be one of {SOLVE_KINDS}')
    sign = int(cfg.get("sign", 1))
    if sign not in (1, -1):
        raise InputError('"sign" must be 1 or -1')
    src = source_from_obj(cfg["source"], base_dir) if "source" in cfg else None
    init = source_from_obj(cfg["initial"], base_dir) if "initial" in cfg else None
    F = src.field if src is not None else None
    K0 = init.field if init is not None else None
    zero = BqField.constant(0.0)

    if kind == "biwave":
        solve = lambda p: wv.biwave_solve(sign, F, K0, p, q, h)
        field = wv.biwave_solution_field(sign, F, K0, q, h)
        residual = lambda p: bigradient(sign, field, p, h) - (F or zero).at(p)
    elif kind == "maxwell":
        solve = lambda p: wv.kirchhoff_maxwell(F, K0, p, q, h)
        neg = None if F is None else BqField(lambda t, x: -F(t, x))
        field = wv.biwave_solution_field(1, neg, K0, q, h)
        residual = lambda p: bigradient(1, field, p, h) + (F or zero).at(p)
    elif kind == "md":
        m = _complex(cfg.get("m", 0.0), "m")
        solve = lambda p: wv.md_solve(m, sign, F, p, q, h)
        field = wv.md_solution_field(m, sign, F or zero, q, h)
        residual = lambda p: (bigradient(sign, field, p, h) + m * field.at(p)) - (F or zero).at(p)
    else:
        omega = 0.0 if kind == "static" else float(cfg.get("omega", 0.0))
        rho = float(cfg.get("rho", 0.0))
        a = _complex(cfg.get("a", 1.0), "a")
        if omega + rho == 0.0:
            raise ZeroWaveNumber("k = |omega + rho| must be nonzero")
        if src is None:
            solve = lambda p: Biquaternion()
            residual = lambda p: Biquaternion()
        else:
            if src.support is None:
                raise InputError("harmonic solves need a source with bounded support")
            solve = lambda p: wv.harmonic_md_solve(omega, rho, sign, F, p[1:], src.support, a, q, h)
            field = wv.harmonic_solution_field(omega, rho, sign, F, src.support, a, q, h)
            residual = lambda p: (gradiental_apply(omega + rho, sign, field, p[1:], h)
                                  - Biquaternion.from_components(F(np.asarray(0.0), p[1:])))
    return solve, residual


def cmd_solve(args) -> int:
    if not args.config:
        raise InputError("solve needs --config")
    cfg = _load_json(args.config)
    qcfg = cfg.get("quadrature", {})
    q = QuadratureSpec(int(args.quad_r or qcfg.get("n_r", 32)), int(args.quad_s or qcfg.get("n_s", 12)))
    h = float(args.fd_step or cfg.get("fd_step", DEFAULT_FD_STEP))
    solve, residual = _solver(cfg, q, h, Path(args.config).parent)
    pts = _points(cfg)

    def work(p):
        try:
            B = solve(p)
            r = residual(p).norm() if args.residual else None
        except BiquatError as exc:
            raise type(exc)(f"at point {tuple(float(v) for v in p)}: {exc}") from None
        return p, B, r

    rows = _ordered_map(work, pts)
    out, close = _open_out(args.out)
    worst = 0.0
    try:
        header = BQ_COLUMNS + (["residual"] if args.residual else [])
        out.write(",".join(header) + "\n")
        for p, B, r in rows:
            cells = _bq_cells(p, B)
            if args.residual:
                cells.append(_fmt(r))
                worst = max(worst, r)
            out.write(",".join(cells) + "\n")
    finally:
        if close:
            out.close()
    if args.residual:
        print(f"max residual {worst:.3e}", file=sys.stderr)
        if args.tol is not None and not worst <= args.tol:
            print(f"residual exceeds tol {args.tol:.3e}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


# --------------------------------------------------------------------------
# spinor
# --------------------------------------------------------------------------

def _spinor_from(cfg: dict):
    rho = float(cfg.get("rho", 0.0))
    if "xi" in cfg:
        return elementary_xi_spinor(np.asarray(cfg["xi"], float), rho, int(cfg.get("sign", 1)))
    if "omega" in cfg:
        return elementary_omega_spinor(float(cfg["omega"]), rho, np.asarray(cfg.get("e", [0, 0, 1]), float))
    raise InputError('spinor needs "xi" or "omega"')


def cmd_spinor(args) -> int:
    cfg = _load_json(args.config) if args.config else {}
    for key in ("xi", "omega", "rho", "sign", "e"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    sp = _spinor_from(cfg)
    if "points" not in cfg and "grid" not in cfg:
        cfg["points"] = [[0.0, 0.0, 0.0, 0.0]]
    pts = _points(cfg)
    h = args.fd_step

    def work(p):
        S = sp.at(p) if isinstance(sp, XiSpinor) else sp.at(p[1:])
        extra = []
        if args.dirac_residual:
            res = sp.dirac_residual(p, h) if isinstance(sp, XiSpinor) else sp.gradiental_residual(p[1:], h)
            extra.append(res.norm())
        return p, S, extra

    rows = _ordered_map(work, pts)
    out, close = _open_out(args.out)
    worst = 0.0
    try:
        header = BQ_COLUMNS + ["norm", "pseudonorm_re", "pseudonorm_im"]
        if args.dirac_residual:
            header.append("dirac_residual")
        out.write(",".join(header) + "\n")
        for p, S, extra in rows:
            pn = S.pseudonorm()
            cells = _bq_cells(p, S) + [_fmt(S.norm()), _fmt(pn.real), _fmt(pn.imag)]
            cells += [_fmt(v) for v in extra]
            worst = max([worst] + extra)
            out.write(",".join(cells) + "\n")
    finally:
        if close:
            out.close()
    if args.dirac_residual and args.tol is not None and not worst <= args.tol:
        print(f"dirac residual {worst:.3e} exceeds tol {args.tol:.3e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biquat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run seeded identity suites, print a JSON report")
    v.add_argument("--suite", default="all", choices=list(verify_mod.SUITES) + ["all"])
    v.add_argument("--n", type=int, default=100, help="random cases per identity")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=None, help="override every tolerance")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("transform", help="apply a rotor/boost/Poincaré map to JSON-lines points")
    t.add_argument("--config", default=None)
    t.add_argument("--input", default=None, help="JSON-lines file (default stdin)")
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("solve", help="sample a biwave/Maxwell/MD/harmonic solution as CSV")
    s.add_argument("--config", default=None)
    s.add_argument("--out", default=None)
    s.add_argument("--residual", action="store_true")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--fd-step", type=float, default=None)
    s.add_argument("--quad-r", type=int, default=None)
    s.add_argument("--quad-s", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    p = sub.add_parser("spinor", help="sample an elementary spinor as CSV")
    p.add_argument("--config", default=None)
    p.add_argument("--xi", type=float, nargs=3, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--sign", type=int, default=None, choices=[1, -1])
    p.add_argument("--e", type=float, nargs=3, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--dirac-residual", action="store_true")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--fd-step", type=float, default=None)
    p.set_defaults(func=cmd_spinor)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, BiquatError, ValueError, KeyError, TypeError, OSError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"missing key {exc}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
