"""Command line front end: verify | bound | purify | optimize | sweep.

Exit codes: 0 success, 1 domain failure (degenerate pair, unreachable
overlap, inequality violations, soundness breach), 2 bad flags or config.
Machine output goes to stdout (or --out), diagnostics to stderr. Every
random draw flows from --seed, which defaults to 0, never the clock.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import linalg
from .cloning import lower_bound
from .errors import (
    CloneboundError,
    DegeneratePair,
    IndistinguishablePair,
    OutOfRange,
    SoundnessViolation,
    TargetOutOfRange,
)
from .search import (
    OptimizerConfig,
    _fmt17,
    minimize_relative_error,
    restricted_cloner_search,
    sweep_bound,
    sweep_to_csv,
    sweep_to_json,
    verify_inequalities,
)
from .states import DensityMatrix, purifications_with_overlap

_DOMAIN_ERRORS = (TargetOutOfRange, DegeneratePair, IndistinguishablePair,
                  SoundnessViolation)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="clonebound",
        description="Cloning error bounds: verification, evaluation, search.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="randomized inequality checks")
    v.add_argument("--dim", type=int, default=2, help="Hilbert space dimension")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None, help="report file (default stdout)")
    v.add_argument("--format", choices=("json", "csv"), default="json")

    b = sub.add_parser("bound", help="evaluate the relative-error lower bound")
    b.add_argument("--f", type=float, required=True,
                   help="sqrt fidelity of the input pair, in [0, 1)")
    b.add_argument("--phi", type=float, required=True,
                   help="sqrt fidelity of the ancilla pair, in [0, 1]")
    b.add_argument("--n", type=int, default=1, help="input copies")
    b.add_argument("--l", type=int, default=2, help="output copies")

    pu = sub.add_parser("purify",
                        help="build purification pairs with a given overlap")
    pu.add_argument("--states", required=True,
                    help='JSON file with "rho1" and "rho2" matrices')
    pu.add_argument("--phi", type=float, required=True,
                    help="target overlap, in [0, sqrt(F)]")
    pu.add_argument("--out", default=None)

    o = sub.add_parser("optimize", help="search unitaries for low relative error")
    o.add_argument("--config", required=True,
                   help="JSON problem + optimizer settings; flags override")
    o.add_argument("--restarts", type=int, default=None)
    o.add_argument("--iterations", type=int, default=None)
    o.add_argument("--initial-step", dest="initial_step", type=float,
                   default=None)
    o.add_argument("--step-decay", dest="step_decay", type=float, default=None)
    o.add_argument("--convergence-tol", dest="convergence_tol", type=float,
                   default=None)
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--out", default=None)
    o.add_argument("--format", choices=("json", "csv"), default="json")

    s = sub.add_parser("sweep", help="tabulate the bound along an f grid")
    s.add_argument("--config", default=None)
    s.add_argument("--f-min", dest="f_min", type=float, default=None)
    s.add_argument("--f-max", dest="f_max", type=float, default=None)
    s.add_argument("--points", type=int, default=None)
    s.add_argument("--phi", type=float, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--l", type=int, default=None)
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    return p


def _write(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise OutOfRange(f"{path}: expected a JSON object at top level")
    return doc


def _pick(flag_value, doc: dict, key: str, default):
    """Flag if given, else config file value, else the documented default."""
    if flag_value is not None:
        return flag_value
    return doc.get(key, default)


def _state_from(doc: dict, key: str) -> DensityMatrix:
    if key not in doc:
        raise OutOfRange(f'config is missing the "{key}" state')
    return DensityMatrix.from_dict(doc[key])


def cmd_verify(args) -> int:
    report = verify_inequalities(args.dim, args.trials, args.seed)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _write(text, args.out)
    return 0 if report.violations == 0 else 1


def cmd_bound(args) -> int:
    value = lower_bound(args.f, args.phi, args.n, args.l)
    sys.stdout.write(_fmt17(value) + "\n")
    return 0


def cmd_purify(args) -> int:
    doc = _load_json(args.states)
    rho1 = _state_from(doc, "rho1")
    rho2 = _state_from(doc, "rho2")
    y1, y2 = purifications_with_overlap(rho1, rho2, args.phi)
    d = rho1.dim
    residuals = []
    for y, rho in ((y1, rho1), (y2, rho2)):
        marg = linalg.partial_trace(y.density().matrix, [d, y.dim // d], {0})
        residuals.append(float(np.linalg.norm(marg - rho.matrix)))
    out_doc = {
        "phi": float(args.phi),
        "achieved_overlap": float(abs(np.vdot(y1.amp, y2.amp))),
        "marginal_residuals": residuals,
        "y1": y1.to_dict(),
        "y2": y2.to_dict(),
    }
    _write(json.dumps(out_doc, indent=2), args.out)
    return 0


def _optimize_result_csv(result) -> str:
    header = "best_r,bound,gap,f,phi,n_in,n_out,env_dim,evaluations"
    row = ",".join([
        _fmt17(result.best_r), _fmt17(result.bound), _fmt17(result.gap),
        _fmt17(result.f), _fmt17(result.phi), str(result.n_in),
        str(result.n_out), str(result.env_dim), str(result.evaluations),
    ])
    return header + "\n" + row + "\n"


def cmd_optimize(args) -> int:
    doc = _load_json(args.config)
    rho1 = _state_from(doc, "rho1")
    rho2 = _state_from(doc, "rho2")
    cfg = OptimizerConfig(
        restarts=int(_pick(args.restarts, doc, "restarts", 4)),
        iterations=int(_pick(args.iterations, doc, "iterations", 500)),
        initial_step=float(_pick(args.initial_step, doc, "initial_step", 0.5)),
        step_decay=float(_pick(args.step_decay, doc, "step_decay", 0.9)),
        seed=int(_pick(args.seed, doc, "seed", 0)),
        convergence_tol=float(_pick(args.convergence_tol, doc,
                                    "convergence_tol", 1e-9)),
    )
    if doc.get("restricted", False):
        result = restricted_cloner_search(rho1, rho2, cfg)
    else:
        d = rho1.dim
        n_in = int(doc.get("n", 1))
        n_out = int(doc.get("l", 2))
        env_dim = int(doc.get("env", d * d))
        if "upsilon1" in doc or "upsilon2" in doc:
            ups1 = _state_from(doc, "upsilon1")
            ups2 = _state_from(doc, "upsilon2")
        else:
            anc_dim = d ** (n_out - n_in) * env_dim
            blank = np.zeros((anc_dim, anc_dim), dtype=complex)
            blank[0, 0] = 1.0
            ups1 = ups2 = DensityMatrix(blank)
        result = minimize_relative_error(rho1, rho2, ups1, ups2,
                                         dims=(n_in, n_out, env_dim), cfg=cfg)
    if args.format == "csv":
        _write(_optimize_result_csv(result), args.out)
    else:
        _write(result.to_json(), args.out)
    return 0


def cmd_sweep(args) -> int:
    doc = _load_json(args.config) if args.config else {}
    f_min = float(_pick(args.f_min, doc, "f_min", 0.0))
    f_max = float(_pick(args.f_max, doc, "f_max", 0.99))
    points = int(_pick(args.points, doc, "points", 100))
    phi = float(_pick(args.phi, doc, "phi", 1.0))
    n_in = int(_pick(args.n, doc, "n", 1))
    n_out = int(_pick(args.l, doc, "l", 2))
    if points < 1:
        raise OutOfRange(f"points={points} must be >= 1")
    grid = np.linspace(f_min, f_max, points)
    rows = sweep_bound(grid, phi, n_in, n_out)
    text = sweep_to_json(rows) if args.format == "json" else sweep_to_csv(rows)
    _write(text, args.out)
    return 0


_HANDLERS = {
    "verify": cmd_verify,
    "bound": cmd_bound,
    "purify": cmd_purify,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already wrote the usage diagnostic
        code = exc.code
        return 0 if code in (0, None) else 2
    try:
        return _HANDLERS[args.command](args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CloneboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
