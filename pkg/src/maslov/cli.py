"""Command-line front end: JSON in, JSON report out.

Exit codes: 0 success, 2 malformed input, 3 violated precondition,
4 a verification suite reported failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from . import generators as gen
from .bundle import (
    PhaseChart,
    TestFunction,
    check_signature_relation,
    holonomy_value,
    q_psi,
    transition_exponent,
)
from .errors import InvalidInputError, MaslovError, PreconditionError
from .index import (
    DEFAULT_TOL_CROSS,
    LagrangianPath,
    crossing_events,
    hormander_index,
    interpolating_path,
    phase_steps,
    relative_index,
    winding_index,
)
from .symplectic_core import (
    IsotropicSubspace,
    LagrangianFrame,
    SymplecticSpace,
    reduce as reduce_by_isotropic,
    set_rank_tolerance,
    signature,
)
from .verify import SUITES, run_suite


# -- JSON plumbing -----------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def load_json_arg(text: str):
    """Inline JSON if the argument looks like JSON, stdin for '-', else a file."""
    text = text.strip()
    if text == "-":
        raw = sys.stdin.read()
    elif text.startswith("{") or text.startswith("["):
        raw = text
    else:
        if not os.path.exists(text):
            raise InvalidInputError(f"no such input file: {text}")
        with open(text, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON: {exc}") from exc


def _digest(payload) -> str:
    canon = json.dumps(_jsonable(payload), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def build_report(command: str, inputs, results, diagnostics, seed) -> dict:
    return {
        "command": command,
        "inputs": _jsonable(inputs),
        "inputs_digest": _digest(inputs),
        "results": _jsonable(results),
        "diagnostics": _jsonable(diagnostics),
        "version": __version__,
        "seed": seed,
    }


def emit(report: dict, args) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.quiet:
            print(f"report written to {args.output}")
    else:
        sys.stdout.write(text)


# -- spec parsing -------------------------------------------------------------

def parse_frame_spec(spec, seed: int) -> LagrangianFrame:
    if not isinstance(spec, dict):
        raise InvalidInputError("frame spec must be a JSON object")
    kind = spec.get("kind", "columns")
    if "n" not in spec:
        raise InvalidInputError("frame spec needs the half-dimension 'n'")
    space = SymplecticSpace(int(spec["n"]))
    if kind == "columns":
        if "columns" not in spec:
            raise InvalidInputError("frame spec needs 'columns' (2n x n, row-major)")
        return LagrangianFrame(space, np.asarray(spec["columns"], dtype=float))
    if kind == "horizontal":
        return LagrangianFrame.horizontal(space)
    if kind == "vertical":
        return LagrangianFrame.vertical(space)
    if kind == "graph":
        return LagrangianFrame.from_symmetric(
            space, np.asarray(spec.get("sym"), dtype=float))
    if kind == "random":
        rng = gen.rng_for(int(spec.get("seed", seed)))
        return gen.random_lagrangian(space, rng)
    raise InvalidInputError(f"unknown frame kind {kind!r}")


def parse_path_spec(spec, seed: int) -> LagrangianPath:
    if not isinstance(spec, dict):
        raise InvalidInputError("path spec must be a JSON object")
    if "samples" in spec:
        if "n" not in spec:
            raise InvalidInputError("inline path spec needs 'n'")
        space = SymplecticSpace(int(spec["n"]))
        frames = [LagrangianFrame(space, np.asarray(s, dtype=float))
                  for s in spec["samples"]]
        params = spec.get("params")
        params = np.asarray(params, dtype=float) if params is not None else None
        return LagrangianPath(space, frames, params,
                              closed=bool(spec.get("closed", False)))
    kind = spec.get("kind")
    if kind in ("generator", "unitary_loop", "random"):
        space = SymplecticSpace(int(spec.get("n", 1)))
        resolution = int(spec.get("resolution", 256))
        if resolution < 16:
            raise InvalidInputError(f"resolution must be >= 16, got {resolution}")
        if kind == "generator":
            return gen.generator_loop(space, int(spec.get("winding", 1)),
                                      resolution)
        rng = gen.rng_for(int(spec.get("seed", seed)))
        if kind == "unitary_loop":
            return gen.unitary_loop(space, int(spec.get("winding", 1)),
                                    resolution, rng)
        loop, _ = gen.random_loop(space, resolution, rng)
        return loop
    if kind == "interpolate":
        a = parse_frame_spec(spec.get("from"), seed)
        b = parse_frame_spec(spec.get("to"), seed)
        return interpolating_path(a, b, int(spec.get("resolution", 128)))
    raise InvalidInputError(
        "path spec needs 'samples' or a kind in "
        "{'generator', 'unitary_loop', 'random', 'interpolate'}"
    )


def parse_delta_spec(spec, space: SymplecticSpace) -> IsotropicSubspace:
    if not isinstance(spec, dict):
        raise InvalidInputError("delta spec must be a JSON object")
    if "columns" in spec:
        return IsotropicSubspace(space, np.asarray(spec["columns"], dtype=float))
    if "axes" in spec:
        cols = np.zeros((space.dim, len(spec["axes"])))
        for j, label in enumerate(spec["axes"]):
            label = str(label)
            if label.startswith("xi"):
                idx = space.n + int(label[2:]) - 1
            elif label.startswith("x"):
                idx = int(label[1:]) - 1
            else:
                raise InvalidInputError(f"bad axis label {label!r}")
            if not 0 <= idx < space.dim:
                raise InvalidInputError(f"axis {label!r} outside the space")
            cols[idx, j] = 1.0
        return IsotropicSubspace(space, cols)
    raise InvalidInputError("delta spec needs 'columns' or 'axes'")


def _parse_chart(data) -> tuple[PhaseChart, TestFunction]:
    try:
        chart = PhaseChart(
            int(data["n"]), int(data["N"]),
            np.asarray(data["hess_xx"], dtype=float),
            np.asarray(data["hess_xtheta"], dtype=float),
            np.asarray(data["hess_thetatheta"], dtype=float),
        )
    except KeyError as exc:
        raise InvalidInputError(f"chart file missing key {exc}") from exc
    psi_xx = data.get("psi_xx")
    if psi_xx is None:
        psi_xx = np.zeros((int(data["n"]), int(data["n"])))
    psi = TestFunction(np.asarray(psi_xx, dtype=float))
    return chart, psi


# -- subcommands ---------------------------------------------------------------

def cmd_winding(args) -> int:
    spec = load_json_arg(args.path_spec)
    path = parse_path_spec(spec, args.seed)
    index = winding_index(path)
    steps = phase_steps(path)
    report = build_report(
        "winding", {"path": spec},
        {"index": index},
        {"max_phase_step": float(np.max(np.abs(steps))),
         "samples": len(path)},
        args.seed,
    )
    emit(report, args)
    return 0


def cmd_crossings(args) -> int:
    path_spec = load_json_arg(args.path_spec)
    alpha_spec = load_json_arg(args.alpha)
    path = parse_path_spec(path_spec, args.seed)
    alpha = parse_frame_spec(alpha_spec, args.seed)
    if not path.closed:
        raise PreconditionError("crossings needs a closed path")
    beta = None
    beta_spec = "AUTO"
    if args.beta and args.beta.upper() != "AUTO":
        beta_spec = load_json_arg(args.beta)
        beta = parse_frame_spec(beta_spec, args.seed)
    events = crossing_events(path, alpha, beta, tol_cross=args.tol_cross)
    index = sum(ev.jump for ev in events) // 2
    report = build_report(
        "crossings",
        {"path": path_spec, "alpha": alpha_spec, "beta": beta_spec},
        {"index": index,
         "events": [{"t": ev.t_star, "dim": ev.crossing_dim, "jump": ev.jump}
                    for ev in events]},
        {"n_events": len(events)},
        args.seed,
    )
    emit(report, args)
    return 0


def cmd_hormander(args) -> int:
    data = load_json_arg(args.frames)
    frames = {}
    for key in ("alpha", "alpha_p", "beta", "beta_p"):
        if key not in data:
            raise InvalidInputError(f"hormander input needs frame {key!r}")
        frames[key] = parse_frame_spec(data[key], args.seed)
    method = args.method
    results = {}
    if method in ("signature", "both"):
        results["s_signature"] = hormander_index(
            frames["alpha"], frames["alpha_p"], frames["beta"],
            frames["beta_p"], method="signature")
    if method in ("path", "both"):
        results["s_path"] = hormander_index(
            frames["alpha"], frames["alpha_p"], frames["beta"],
            frames["beta_p"], method="path")
    if method == "both":
        results["equal"] = results["s_signature"] == results["s_path"]
        results["s"] = results["s_signature"]
    else:
        results["s"] = results.get("s_signature", results.get("s_path"))
    report = build_report("hormander", {"frames": data, "method": method},
                          results, {}, args.seed)
    emit(report, args)
    return 0


def cmd_relative(args) -> int:
    lam_spec = load_json_arg(args.lam)
    lam0_spec = load_json_arg(args.lam0)
    sigma_spec = load_json_arg(args.sigma)
    lam = parse_path_spec(lam_spec, args.seed)
    lam0 = parse_path_spec(lam0_spec, args.seed)
    sigma = parse_path_spec(sigma_spec, args.seed)
    index = relative_index(lam, lam0, sigma)
    report = build_report(
        "relative", {"lam": lam_spec, "lam0": lam0_spec, "sigma": sigma_spec},
        {"index": index}, {}, args.seed,
    )
    emit(report, args)
    return 0


def cmd_reduce(args) -> int:
    lam_spec = load_json_arg(args.lam)
    delta_spec = load_json_arg(args.delta)
    lam = parse_frame_spec(lam_spec, args.seed)
    delta = parse_delta_spec(delta_spec, lam.space)
    reduced = reduce_by_isotropic(lam, delta)
    report = build_report(
        "reduce", {"lam": lam_spec, "delta": delta_spec},
        {"n": reduced.space.n, "columns": reduced.columns},
        {}, args.seed,
    )
    emit(report, args)
    return 0


def cmd_holonomy(args) -> int:
    mu = args.mu
    value = holonomy_value(mu)
    report = build_report(
        "holonomy", {"mu": mu},
        {"exponent": mu % 4, "value": [value.real, value.imag]},
        {}, args.seed,
    )
    emit(report, args)
    return 0


def cmd_charts(args) -> int:
    data = load_json_arg(args.chart)
    chart, psi = _parse_chart(data)
    q = q_psi(chart, psi)
    results = {
        "q_psi_signature": signature(q),
        "q_psi_nondegenerate": q.nondegenerate,
        "theta_signature": chart.theta_signature,
    }

    if q.nondegenerate:
        lhs, rhs, equal = check_signature_relation(chart, psi)
        results.update({"relation_lhs": lhs, "relation_rhs": rhs,
                        "relation_holds": equal})
    inputs = {"chart": data}
    if args.chart_b:
        data_b = load_json_arg(args.chart_b)
        chart_b, _ = _parse_chart(data_b)
        exponent = transition_exponent(chart, chart_b, psi)
        results["transition_exponent_i"] = (exponent // 2) % 4
        inputs["chart_b"] = data_b
    report = build_report("charts", inputs, results, {}, args.seed)
    emit(report, args)
    return 0


def cmd_verify(args) -> int:
    result = run_suite(args.suite, args.trials, args.seed)
    report = build_report(
        "verify", {"suite": args.suite, "trials": args.trials},
        result.to_dict(),
        {"ok": result.ok},
        args.seed,
    )
    emit(report, args)
    return 0 if result.ok else 4


# -- argument parsing -----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maslov",
        description="Indices of loops of Lagrangian subspaces, computed by "
                    "independent engines, plus the identity checks tying "
                    "them together.",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="default seed (falls back to MASLOV_SEED, then 0)")
    parser.add_argument("--tol-rank", type=float, default=1e-9,
                        help="relative singular-value cutoff for rank decisions")
    parser.add_argument("--tol-cross", type=float, default=DEFAULT_TOL_CROSS,
                        help="crossing-scan dip tolerance")
    parser.add_argument("--output", default=None,
                        help="report file path ('-' or omitted: stdout)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress non-report chatter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("winding", help="winding index of a closed path")
    p.add_argument("path_spec", help="path spec: JSON file, inline JSON, or '-'")
    p.set_defaults(fn=cmd_winding)

    p = sub.add_parser("crossings",
                       help="crossing events and index against a frame")
    p.add_argument("path_spec")
    p.add_argument("alpha", help="reference frame spec")
    p.add_argument("--beta", default="AUTO",
                   help="auxiliary frame spec or AUTO (default)")
    p.set_defaults(fn=cmd_crossings)

    p = sub.add_parser("hormander", help="four-frame index")
    p.add_argument("frames",
                   help="JSON with frame specs alpha, alpha_p, beta, beta_p")
    p.add_argument("--method", choices=("signature", "path", "both"),
                   default="both")
    p.set_defaults(fn=cmd_hormander)

    p = sub.add_parser("relative",
                       help="index of a loop against a reference loop")
    p.add_argument("--lam", required=True, help="closed path spec")
    p.add_argument("--lam0", required=True, help="closed reference path spec")
    p.add_argument("--sigma", required=True,
                   help="open path spec from lam(0) to lam0(0)")
    p.set_defaults(fn=cmd_relative)

    p = sub.add_parser("reduce", help="symplectic reduction of a frame")
    p.add_argument("--lam", required=True, help="frame spec in the big space")
    p.add_argument("--delta", required=True,
                   help="isotropic spec: {'columns': ...} or {'axes': ['x2']}")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("holonomy", help="i^mu, exactly")
    p.add_argument("mu", type=int)
    p.set_defaults(fn=cmd_holonomy)

    p = sub.add_parser("charts",
                       help="chart pairing, signature relation, transition")
    p.add_argument("chart", help="chart JSON "
                   "{n, N, hess_xx, hess_xtheta, hess_thetatheta, psi_xx}")
    p.add_argument("--chart-b", default=None,
                   help="second chart for the transition factor")
    p.set_defaults(fn=cmd_charts)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = int(os.environ.get("MASLOV_SEED", "0"))
    set_rank_tolerance(args.tol_rank)
    try:
        return args.fn(args)
    except MaslovError as exc:
        report = {
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "version": __version__,
            "seed": args.seed,
        }
        emit(report, args)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
