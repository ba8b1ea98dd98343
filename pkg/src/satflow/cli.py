"""Command-line interface: check | simulate | equilibria | sweep.

Scenario files are JSON documents with keys "routing", "capacity",
"demand", optional "inflow"/"outflow", an optional "name" string, and an
optional "integrator" object overriding the integrator defaults.  Unknown
keys are rejected.

Exit codes: 0 success, 2 invalid scenario, 3 numerical failure,
4 precondition violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics, equilibria, model, transitions
from .errors import NumericalError, PreconditionError, ScenarioError

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_NUMERICAL = 3
EXIT_PRECONDITION = 4

_SCENARIO_KEYS = {"routing", "capacity", "demand", "inflow", "outflow", "name", "integrator"}
_INTEGRATOR_KEYS = {"dt", "t_end", "sample_every", "residual_tol"}


def load_scenario(path: str) -> tuple[model.NetworkSpec, dynamics.IntegratorConfig, str]:
    """Parse and validate a scenario file; returns (spec, integrator, name)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = doc.keys() - _SCENARIO_KEYS
    if unknown:
        raise ScenarioError(f"unknown keys: {sorted(unknown)}")
    spec = model.NetworkSpec.from_dict({k: doc[k] for k in doc if k in {"routing", "capacity", "demand", "inflow", "outflow"}})
    cfg_kwargs = {}
    integrator = doc.get("integrator", {})
    if not isinstance(integrator, dict):
        raise ScenarioError("integrator must be an object")
    unknown = integrator.keys() - _INTEGRATOR_KEYS
    if unknown:
        raise ScenarioError(f"unknown integrator keys: {sorted(unknown)}")
    cfg_kwargs.update(integrator)
    try:
        cfg = dynamics.IntegratorConfig(**cfg_kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid integrator settings: {exc}") from exc
    return spec, cfg, str(doc.get("name", ""))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _vector_arg(text: str, n: int, what: str) -> np.ndarray:
    try:
        vec = np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ScenarioError(f"{what} must be a comma-separated list of numbers") from exc
    if vec.shape != (n,):
        raise ScenarioError(f"{what} must have length {n}, got {vec.size}")
    return vec


def cmd_check(args) -> int:
    spec, _, _ = load_scenario(args.scenario)
    cls = model.classify_routing(spec.routing)
    report = {
        "class": cls.tag,
        "detail": cls.detail,
        "row_sums": [float(s) for s in model.row_sums(spec.routing)],
    }
    leaky = model.leaky_nodes(spec.routing)
    if leaky:
        report["leaky_nodes"] = [i + 1 for i in leaky]
    if cls.tag == model.STOCHASTIC_IRREDUCIBLE:
        report["pi"] = [float(p) for p in model.invariant_vector(spec.routing)]
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _initial_state(arg: str, spec: model.NetworkSpec) -> np.ndarray:
    if arg == "zero":
        return np.zeros(spec.n)
    if arg == "cap":
        return spec.capacity.copy()
    return _vector_arg(arg, spec.n, "--x0")


def cmd_simulate(args) -> int:
    spec, cfg, _ = load_scenario(args.scenario)
    if args.t_end is not None:
        cfg.t_end = args.t_end
    if args.dt is not None:
        cfg.dt = args.dt
    cfg = dynamics.IntegratorConfig(dt=cfg.dt, t_end=cfg.t_end,
                                    sample_every=cfg.sample_every,
                                    residual_tol=cfg.residual_tol)
    x0 = _initial_state(args.x0, spec)
    traj = dynamics.integrate(spec, x0, cfg)
    header = "t," + ",".join(f"x{i + 1}" for i in range(spec.n)) + ",residual_l1"
    lines = [header]
    for t, x in zip(traj.times, traj.states):
        res = float(np.abs(dynamics.net_flow(spec, x)).sum())
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in x] + [_fmt(res)]))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    json.dump({"converged": traj.converged, "final_residual": traj.final_residual}, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK if traj.converged else EXIT_NUMERICAL


def _equilibrium_json(eq: equilibria.EquilibriumSet) -> dict:
    out = {
        "kind": eq.kind,
        "x_min": [float(v) for v in eq.x_min],
        "x_max": [float(v) for v in eq.x_max],
    }
    if eq.alpha_min is not None:
        out["alpha_min"] = eq.alpha_min
        out["alpha_max"] = eq.alpha_max
        out["hc"] = [float(v) for v in eq.hc]
        out["pi"] = [float(v) for v in eq.pi]
    if eq.condition_value is not None:
        out["condition_value"] = eq.condition_value
    return out


def cmd_equilibria(args) -> int:
    spec, _, _ = load_scenario(args.scenario)
    eq = equilibria.equilibrium_set(spec)
    json.dump(_equilibrium_json(eq), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec, _, _ = load_scenario(args.scenario)
    c_start = _vector_arg(args.c_start, spec.n, "--c-start")
    c_end = _vector_arg(args.c_end, spec.n, "--c-end")
    path = transitions.DemandPath(c_start=c_start, c_end=c_end, samples=args.samples)
    result = transitions.sweep(spec.routing, spec.capacity, path)
    n = spec.n
    header = (
        "s,"
        + ",".join(f"c{i + 1}" for i in range(n))
        + ",kind,cond_value,"
        + ",".join(f"xmin{i + 1}" for i in range(n))
        + ","
        + ",".join(f"xmax{i + 1}" for i in range(n))
        + ",on_manifold"
    )
    lines = [header]
    for row in result.rows:
        cond = "" if row.condition_value is None else _fmt(row.condition_value)
        lines.append(
            ",".join(
                [_fmt(row.s)]
                + [_fmt(v) for v in row.c]
                + [row.kind, cond]
                + [_fmt(v) for v in row.x_min]
                + [_fmt(v) for v in row.x_max]
                + [str(bool(row.on_manifold)).lower()]
            )
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    sidecar = {"critical": [{"s": j["s"], "jump": j["magnitude"]} for j in result.jumps]}
    if result.unresolved:
        sidecar["unresolved"] = result.unresolved
    sidecar_path = sidecar_path_for(args.out)
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    json.dump({"rows": len(result.rows), "critical_points": len(result.jumps), "sidecar": sidecar_path}, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def sidecar_path_for(out_path: str) -> str:
    base = out_path[:-4] if out_path.endswith(".csv") else out_path
    return base + ".critical.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satflow", description="Saturated flow network analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a scenario and classify its routing matrix")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="integrate the flow dynamics and write a trajectory CSV")
    p.add_argument("scenario")
    p.add_argument("--x0", default="zero", help='"zero", "cap", or a comma-separated state')
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibria", help="compute and classify the equilibrium set")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("sweep", help="sweep an affine demand path and report critical points")
    p.add_argument("scenario")
    p.add_argument("--c-start", required=True)
    p.add_argument("--c-end", required=True)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
