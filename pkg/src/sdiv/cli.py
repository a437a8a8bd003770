"""Command-line front end.

Every command prints one JSON record on stdout (inputs echoed, results at 12
significant digits, infinities as ``"inf"``). Commands that emit tables write
them as CSV to ``--out``. Failures print ``{"error": {...}}`` and exit 1.
Numeric tolerances can be overridden with ``SDIV_<FIELD>`` environment
variables, e.g. ``SDIV_GRID_POINTS=2049``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import asymptotics, divergences, oneshot
from .channels import load_channel
from .errors import SdivError, ValidationError
from .linalg import density_matrix, hermitian_asymmetry, load_state, save_state
from .oracles import ClassicalPair
from .policy import NumericPolicy
from .states import generate_state

DIVERGENCE_KINDS = ("xi_s", "chernoff", "umegaki", "d_min", "petz", "hoeffding", "fixed_point", "lipschitz")
ONESHOT_KINDS = ("q_s", "q_min", "beta_eps", "p_err", "p_err_s")


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def to_json_ready(obj):
    """Round floats to 12 significant digits and spell out infinities."""
    if isinstance(obj, dict):
        return {k: to_json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json_ready(v) for v in obj]
    if isinstance(obj, (float, int, np.floating, np.integer, np.bool_)):
        return _num(obj)
    return obj


def write_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_or_generate(source: str, seed: int, policy=None) -> np.ndarray:
    """A state from a JSON file path or a generator spec such as ``random:3``."""
    if os.path.exists(source) or source.endswith(".json"):
        return load_state(source, policy)
    return density_matrix(generate_state(source, seed, policy), policy)


def _states(args, policy):
    # sigma draws from the next seed so that random:d vs random:d differ
    rho = load_or_generate(args.rho, args.seed, policy)
    sigma = load_or_generate(args.sigma, args.seed + 1, policy)
    return rho, sigma


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"--{args.kind} needs " + ", ".join("--" + m for m in missing), "cli")


def cmd_divergence(args, policy):
    rho, sigma = _states(args, policy)
    prof = divergences.RenyiProfile(rho, sigma, policy)
    kind = args.kind
    if kind == "xi_s":
        _require(args, "s")
        value = prof.xi_s(args.s)
    elif kind == "chernoff":
        value = prof.chernoff()
    elif kind == "umegaki":
        value = prof.umegaki()
    elif kind == "d_min":
        value = prof.d_min()
    elif kind == "petz":
        _require(args, "a")
        value = prof.petz_renyi(args.a)
    elif kind == "hoeffding":
        _require(args, "r")
        value = prof.hoeffding_b(args.r)
    elif kind == "fixed_point":
        _require(args, "s")
        value = prof.solve_fixed_point(args.s)
    else:
        _require(args, "c")
        value = prof.lipschitz_constant(args.c)
    return {"value": value}


def cmd_oneshot(args, policy):
    rho, sigma = _states(args, policy)
    fam = oneshot.ExtremalFamily(rho, sigma, policy)
    kind = args.kind
    if kind == "q_s":
        _require(args, "s")
        pt = fam.solve_q_s_c(args.s, args.C)
        value = pt.beta
    elif kind == "q_min":
        pt = fam.solve_q_s_c(1.0, 1.0)
        value = pt.beta
    elif kind == "beta_eps":
        _require(args, "eps")
        pt = fam.point_at_alpha(args.eps)
        value = pt.beta
    elif kind == "p_err":
        _require(args, "p")
        pt = fam.solve_p_err_bayes(args.p)
        value = args.p * pt.alpha + (1.0 - args.p) * pt.beta
    else:
        _require(args, "s")
        value, pt = fam.solve_p_err_s_c(args.s, args.C)
    cert = pt.as_dict()
    cert["certificate_gap"] = pt.certificate_gap(fam.rho, fam.sigma)
    return {"value": value, "optimizer": cert}


def cmd_boundary(args, policy):
    rho, sigma = _states(args, policy)
    bd = oneshot.np_boundary(rho, sigma, policy)
    asymptotics.write_csv(args.out, ("mu", "alpha", "beta"), bd.rows())
    return {"vertices": len(bd), "alpha_max": bd.alpha_max, "csv": args.out}


def cmd_trace(args, policy):
    if args.classical:
        p = [float(x) for x in args.classical[0].split(",")]
        q = [float(x) for x in args.classical[1].split(",")]
        n_list = [int(x) for x in args.n_list.split(",")]
        tr = asymptotics.classical_exponent_trace(ClassicalPair(p, q), args.s, args.C, n_list)
    else:
        rho, sigma = _states(args, policy)
        tr = asymptotics.quantum_exponent_trace(rho, sigma, args.s, args.C, args.n_max, policy)
    asymptotics.write_csv(args.out, asymptotics.TRACE_HEADER, tr.rows())
    return {"target": tr.target, "rows": tr.rows(), "csv": args.out}


def cmd_fig1(args, policy):
    rho, sigma = _states(args, policy)
    prof = divergences.RenyiProfile(rho, sigma, policy)
    grid = asymptotics.default_r_grid(prof, args.points)
    data = asymptotics.fig1_data(rho, sigma, args.s, grid, policy)
    asymptotics.write_csv(args.out, asymptotics.FIG1_HEADER, data.rows)
    return {
        "chernoff_crossing": data.chernoff_crossing,
        "xi_s_crossing": data.xi_s_crossing,
        "xi": prof.xi_s(1.0),
        "xi_s": prof.xi_s(args.s),
        "csv": args.out,
    }


def cmd_fig2(args, policy):
    rho, sigma = _states(args, policy)
    data = asymptotics.fig2_data(rho, sigma, asymptotics.parse_grid(args.s_grid), policy)
    asymptotics.write_csv(args.out, asymptotics.FIG2_HEADER, data.rows)
    return {"rows": len(data.rows), "csv": args.out}


def _diagnostics(m, policy):
    w = np.linalg.eigvalsh(m)
    return {
        "dim": m.shape[0],
        "trace": float(np.trace(m).real),
        "min_eigenvalue": float(w[0]),
        "rank": int(np.sum(w > policy.support_tol)),
        "hermitian_residual": hermitian_asymmetry(m),
    }


def cmd_validate(args, policy):
    """Load every given input through the validators and report its diagnostics."""
    report = {}
    for name, offset, save in (("rho", 0, args.save_rho), ("sigma", 1, args.save_sigma)):
        source = getattr(args, name)
        if source is None:
            continue
        m = load_or_generate(source, args.seed + offset, policy)
        report[name] = _diagnostics(m, policy)
        if save:
            save_state(save, m)
    if args.channel:
        ch = load_channel(args.channel)
        report["channel"] = {
            "d_in": ch.d_in,
            "d_out": ch.d_out,
            "kraus_count": len(ch.kraus),
            "completeness_residual": ch.completeness_residual(),
        }
    if not report:
        raise ValidationError("validate needs --rho, --sigma or --channel", "cli")
    return {"valid": True, "diagnostics": report}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdiv", description=__doc__.splitlines()[0])
    parser.add_argument("--json-out", help="also write the JSON record to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_states(p, required=True):
        p.add_argument("--rho", required=required, help="state spec (diag:, pure:, random:) or JSON file")
        p.add_argument("--sigma", required=required, help="state spec or JSON file")
        p.add_argument("--seed", type=int, default=0, help="seed for rho; sigma uses seed + 1")
        return p

    p = with_states(sub.add_parser("divergence", help="scalar divergences"))
    p.add_argument("--kind", choices=DIVERGENCE_KINDS, required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--a", type=float, help="Petz-Renyi order in (0, 1)")
    p.add_argument("--r", type=float, help="rate for the Hoeffding bound")
    p.add_argument("--c", type=float, help="lower end of the s-range for the Lipschitz constant")
    p.set_defaults(func=cmd_divergence)

    p = with_states(sub.add_parser("oneshot", help="one-shot error probabilities"))
    p.add_argument("--kind", choices=ONESHOT_KINDS, required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--eps", type=float)
    p.add_argument("--p", type=float, help="prior of rho for the Bayes error")
    p.set_defaults(func=cmd_oneshot)

    p = with_states(sub.add_parser("boundary", help="Neyman-Pearson boundary as CSV"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_boundary)

    p = with_states(sub.add_parser("trace", help="finite-n exponent trace as CSV"), required=False)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=asymptotics.QUANTUM_N_MAX)
    p.add_argument("--classical", nargs=2, metavar=("P", "Q"),
                   help="binary classical pair, e.g. 0.9,0.1 0.5,0.5 (replaces --rho/--sigma)")
    p.add_argument("--n-list", default="1,10,100,1000")
    p.add_argument("--out", default="trace.csv")
    p.set_defaults(func=cmd_trace)

    p = with_states(sub.add_parser("fig1", help="Hoeffding curve with lines r and s*r"))
    p.add_argument("--s", type=float, default=1.0 / 3.0)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--out", default="fig1.csv")
    p.set_defaults(func=cmd_fig1)

    p = with_states(sub.add_parser("fig2", help="xi_s over a grid of s"))
    p.add_argument("--s-grid", default="0.05:1:0.05")
    p.add_argument("--out", default="fig2.csv")
    p.set_defaults(func=cmd_fig2)

    p = with_states(sub.add_parser("validate", help="check inputs and report diagnostics"), required=False)
    p.add_argument("--channel", help="channel JSON file")
    p.add_argument("--save-rho", help="write the loaded or generated rho as JSON")
    p.add_argument("--save-sigma", help="write the loaded or generated sigma as JSON")
    p.set_defaults(func=cmd_validate)
    return parser


def _echo(args):
    skip = {"func", "json_out", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "trace" and not args.classical and (args.rho is None or args.sigma is None):
            raise ValidationError("trace needs --rho and --sigma, or --classical P Q", "cli")
        policy = NumericPolicy.from_env()
        record = {"command": args.command, "inputs": _echo(args)}
        record.update(args.func(args, policy))
        status = 0
    except (SdivError, ValueError, OSError, MemoryError) as exc:
        record = {"error": {
            "type": type(exc).__name__,
            "module": getattr(exc, "module", "cli"),
            "message": str(exc),
        }}
        status = 1
    text = json.dumps(to_json_ready(record), indent=2)
    if args.json_out and status == 0:
        write_atomic(args.json_out, text + "\n")
    print(text, file=stdout)
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
