"""Command-line surface: scenario I/O, game runs, certification tables,
parameter-region sweeps and oracle cross-checks.

Scenario files are JSON with a fixed schema; trajectory output is CSV (one
row per agent per step, 9 significant digits) and events are JSON lines.
Exit codes: 0 clean, 1 input error, 2 time horizon exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import certificates as certs
from .model import (
    EvaderSpec,
    EvaderState,
    PursuerSpec,
    PursuerState,
    Scenario,
    validate_scenario,
)
from .numerics import Polynomial, real_roots
from .sim import SimConfig, run

GOAL_NAME = "half_plane_y_leq_0"

_PURSUER_KEYS = {"x", "y", "theta", "speed", "kappa", "capture_radius", "model"}
_EVADER_KEYS = {"x", "y", "speed", "strategy", "heading"}


class ScenarioFormatError(ValueError):
    pass


def _require_number(entry: dict, key: str, where: str) -> float:
    if key not in entry:
        raise ScenarioFormatError(f"{where}: missing required key {key!r}")
    value = entry[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioFormatError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def parse_scenario(doc: dict) -> Scenario:
    """Build a Scenario from a parsed JSON document, rejecting unknown keys
    and reporting the offending field on error."""
    if not isinstance(doc, dict):
        raise ScenarioFormatError("top level must be an object")
    unknown = set(doc) - {"goal", "pursuers", "evaders", "seed"}
    if unknown:
        raise ScenarioFormatError(f"unknown top-level keys: {sorted(unknown)}")
    if doc.get("goal") != GOAL_NAME:
        raise ScenarioFormatError(f"goal: expected {GOAL_NAME!r}, got {doc.get('goal')!r}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioFormatError(f"seed: expected an integer, got {seed!r}")

    pursuers = []
    for idx, entry in enumerate(doc.get("pursuers", [])):
        where = f"pursuers[{idx}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"{where}: expected an object")
        unknown = set(entry) - _PURSUER_KEYS
        if unknown:
            raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")
        model = entry.get("model", "dubins")
        if model not in ("dubins", "simple"):
            raise ScenarioFormatError(f"{where}.model: expected dubins|simple, got {model!r}")
        try:
            pursuers.append(
                PursuerSpec(
                    state=PursuerState(
                        pos=np.array(
                            [_require_number(entry, "x", where), _require_number(entry, "y", where)]
                        ),
                        theta=_require_number(entry, "theta", where),
                    ),
                    motion=model,
                    v=_require_number(entry, "speed", where),
                    kappa=_require_number(entry, "kappa", where),
                    r=_require_number(entry, "capture_radius", where),
                )
            )
        except ValueError as exc:
            raise ScenarioFormatError(f"{where}: {exc}") from exc

    evaders = []
    for idx, entry in enumerate(doc.get("evaders", [])):
        where = f"evaders[{idx}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"{where}: expected an object")
        unknown = set(entry) - _EVADER_KEYS
        if unknown:
            raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")
        strategy = entry.get("strategy", "random_goal")
        if strategy not in ("optimal", "constant", "random_goal"):
            raise ScenarioFormatError(
                f"{where}.strategy: expected optimal|constant|random_goal, got {strategy!r}"
            )
        heading = None
        if "heading" in entry:
            heading = _require_number(entry, "heading", where)
        try:
            evaders.append(
                EvaderSpec(
                    state=EvaderState(
                        pos=np.array(
                            [_require_number(entry, "x", where), _require_number(entry, "y", where)]
                        )
                    ),
                    v=_require_number(entry, "speed", where),
                    strategy=strategy,
                    heading=heading,
                )
            )
        except ValueError as exc:
            raise ScenarioFormatError(f"{where}: {exc}") from exc

    if not pursuers:
        raise ScenarioFormatError("pursuers: at least one pursuer required")
    if not evaders:
        raise ScenarioFormatError("evaders: at least one evader required")
    return Scenario(pursuers=tuple(pursuers), evaders=tuple(evaders), seed=seed)


def scenario_to_doc(sc: Scenario) -> dict:
    """Serialize a Scenario to its canonical JSON document (fixed key
    order, shortest round-trip floats)."""
    doc = {"goal": GOAL_NAME, "pursuers": [], "evaders": [], "seed": sc.seed}
    for spec in sc.pursuers:
        doc["pursuers"].append(
            {
                "x": float(spec.state.pos[0]),
                "y": float(spec.state.pos[1]),
                "theta": spec.state.theta,
                "speed": spec.v,
                "kappa": spec.kappa,
                "capture_radius": spec.r,
                "model": spec.motion,
            }
        )
    for spec in sc.evaders:
        entry = {
            "x": float(spec.state.pos[0]),
            "y": float(spec.state.pos[1]),
            "speed": spec.v,
            "strategy": spec.strategy,
        }
        if spec.heading is not None:
            entry["heading"] = spec.heading
        doc["evaders"].append(entry)
    return doc


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_scenario(doc)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_trajectory_csv(result, path: str | Path):
    """CSV rows sorted by (t, kind, agent); floats at 9 significant digits;
    theta and target are empty for evaders."""
    rows = []
    for agent, series in result.trajectories.items():
        kind = "pursuer" if agent.startswith("P") else "evader"
        index = int(agent[1:])
        for t, x, y, theta, u, _mode, status, target in series:
            target_name = "" if target is None else f"E{target + 1}"
            rows.append(
                (t, kind, index, agent, x, y, theta, u, status, target_name)
            )
    rows.sort(key=lambda row: (row[0], row[1], row[2]))
    with open(path, "w") as fh:
        fh.write("t,agent,kind,x,y,theta,u,status,target\n")
        for t, kind, _index, agent, x, y, theta, u, status, target_name in rows:
            fh.write(
                f"{_fmt(t)},{agent},{kind},{_fmt(x)},{_fmt(y)},"
                f"{_fmt(theta)},{_fmt(u)},{status},{target_name}\n"
            )


def write_events(result, path: str | Path):
    with open(path, "w") as fh:
        for event in result.events:
            record = {
                "t": event.t,
                "kind": event.kind,
                "pursuer": None if event.pursuer is None else f"P{event.pursuer + 1}",
                "evader": None if event.evader is None else f"E{event.evader + 1}",
            }
            if event.detail:
                record["detail"] = [[f"P{i + 1}", f"E{j + 1}"] for i, j in event.detail]
            fh.write(json.dumps(record) + "\n")


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
        cfg = SimConfig(
            dt=args.dt,
            max_time=args.max_time,
            matching_period=args.matching_period,
            sticky=args.sticky,
        )
        violations = validate_scenario(sc)
        if violations:
            for violation in violations:
                print(f"error: {violation}", file=sys.stderr)
            return 1
        result = run(sc, cfg)
    except (ScenarioFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        write_trajectory_csv(result, args.out)
    if args.events_out:
        write_events(result, args.events_out)
    captures = sum(1 for e in result.events if e.kind == "capture")
    arrivals = sum(1 for e in result.events if e.kind == "goal_arrival")
    print(f"captures={captures} goal_arrivals={arrivals} horizon_exceeded={result.horizon_exceeded}")
    return 2 if result.horizon_exceeded else 0


def _certificate_line(i: int, j: int, sc: Scenario) -> str:
    from .model import JointState

    p = sc.pair_params(i, j)
    state = JointState(pursuer=sc.pursuers[i].state, evader=sc.evaders[j].state)
    cert = certs.certify_win(state, p, motion=sc.pursuers[i].motion)
    ev = cert.evidence
    region = certs.classify_region(p.r, p.kappa, p.alpha)
    parts = [
        f"P{i + 1}-E{j + 1}",
        f"kind={cert.kind.value}",
        f"sc={ev.sc}",
        f"io={ev.io}",
        f"h_alpha={_fmt(region.curvature_demand)}",
    ]
    if ev.adjust_duration is not None:
        parts.append(f"delta={_fmt(ev.adjust_duration)}")
    if ev.clearance is not None:
        parts.append(f"clearance={_fmt(ev.clearance)}")
    parts.append(f"region={region.label.value}")
    return " ".join(parts)


def cmd_certify(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.all:
        pairs = [(i, j) for i in range(len(sc.pursuers)) for j in range(len(sc.evaders))]
    else:
        try:
            i_str, j_str = args.pair.split(",")
            pair = (int(i_str) - 1, int(j_str) - 1)
        except (AttributeError, ValueError):
            print("error: --pair expects I,J (1-indexed)", file=sys.stderr)
            return 1
        if not (0 <= pair[0] < len(sc.pursuers)) or not (0 <= pair[1] < len(sc.evaders)):
            print(f"error: pair {args.pair} out of range", file=sys.stderr)
            return 1
        pairs = [pair]
    for i, j in pairs:
        print(_certificate_line(i, j, sc))
    return 0


def crossing_alpha() -> float:
    """Speed ratio at which the closed-form demand bound and the
    heading-adjust ratio cross: the positive root of a^3 - a^2 - 1."""
    cubic = Polynomial((-1.0, 0.0, -1.0, 1.0))
    roots = real_roots(cubic, 1.0, 2.0, tol=1e-12)
    return roots[0]


def cmd_sweep_regions(args) -> int:
    if not (1.0 < args.alpha_min < args.alpha_max) or args.samples < 2:
        print("error: need 1 < alpha-min < alpha-max and samples >= 2", file=sys.stderr)
        return 1
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.samples)
    alpha0 = crossing_alpha()
    with open(args.out, "w") as fh:
        fh.write(f"# alpha0={alpha0:.9g}\n")
        fh.write("alpha,h_alpha,h_bar,eq15_rhs\n")
        for alpha in alphas:
            alpha = float(alpha)
            fh.write(
                f"{alpha:.9g},{certs.curvature_demand(alpha):.9g},"
                f"{certs.curvature_demand_bound(alpha):.9g},"
                f"{certs.heading_adjust_ratio(alpha):.9g}\n"
            )
    print(f"wrote {args.samples} rows to {args.out} (alpha0={alpha0:.9g})")
    return 0


def cmd_oracle_compare(args) -> int:
    if args.trials < 1:
        print("error: trials must be >= 1", file=sys.stderr)
        return 1
    from .model import GameParams

    p = GameParams.from_alpha(v_p=0.3, alpha=6.3, kappa=0.0625, r=0.1)
    rng = np.random.default_rng(args.seed)
    violations = 0
    lines = ["trial,clearance_closed,oracle_relaxed,oracle_rollout,abs_err,ok"]
    for trial in range(args.trials):
        state = certs.sample_adjust_feasible_state(rng, p)
        solution = certs.solve_relaxed_clearance(state, p)
        relaxed = certs.relaxed_clearance_oracle(state, p, grid=args.grid)
        rollout = certs.rollout_clearance_oracle(state, p, grid=args.grid)
        err = abs(solution.clearance - relaxed)
        ok = err <= 1e-3 * (1.0 + abs(solution.clearance)) and (
            solution.clearance <= rollout + 1e-3
        )
        if not ok:
            violations += 1
        lines.append(
            f"{trial},{solution.clearance:.9g},{relaxed:.9g},{rollout:.9g},"
            f"{err:.9g},{int(ok)}"
        )
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"trials={args.trials} violations={violations}")
    return 0 if violations == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dubinsguard",
        description="Guaranteed-winning pursuit against goal-seeking evaders "
        "above a guarded half-plane.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--dt", type=float, default=1e-3)
    p_run.add_argument("--max-time", type=float, default=20.0)
    p_run.add_argument("--matching-period", type=int, default=1)
    p_run.add_argument("--sticky", action="store_true")
    p_run.add_argument("--out", default=None, help="trajectory CSV path")
    p_run.add_argument("--events-out", default=None, help="events JSONL path")
    p_run.set_defaults(func=cmd_run)

    p_cert = sub.add_parser("certify", help="print per-pair winning certificates")
    p_cert.add_argument("--scenario", required=True)
    group = p_cert.add_mutually_exclusive_group(required=True)
    group.add_argument("--pair", help="1-indexed pursuer,evader, e.g. 1,4")
    group.add_argument("--all", action="store_true")
    p_cert.set_defaults(func=cmd_certify)

    p_sweep = sub.add_parser(
        "sweep-regions", help="tabulate the three parameter curves over alpha"
    )
    p_sweep.add_argument("--alpha-min", type=float, required=True)
    p_sweep.add_argument("--alpha-max", type=float, required=True)
    p_sweep.add_argument("--samples", type=int, required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep_regions)

    p_oracle = sub.add_parser(
        "oracle-compare",
        help="cross-check the closed-form clearance bound against both oracles",
    )
    p_oracle.add_argument("--trials", type=int, required=True)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--grid", type=int, default=360)
    p_oracle.add_argument("--out", default=None)
    p_oracle.set_defaults(func=cmd_oracle_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
