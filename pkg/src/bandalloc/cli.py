"""Command-line interface: scenario ingestion, envelope/compare sweeps, simulation.

Subcommands: rates, envelope, decompose, simulate, compare. Scenario files are
JSON (see ``load_scenario``); grid sweeps emit CSV by default, single results
structured text; ``--json`` switches everything to one JSON document. User and
band numbers are 1-based on the command line.

Policy derivation for ``simulate --system ...`` (the CLI has no raw policy
flags): S solves a max-slack assignment LP at the requested rates and
decomposes it; S_hat uses the dominant-system optimum for 2x2 scenarios and
uniform selection otherwise; fixed picks the mapping with the largest
worst-case margin.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, fixedalloc, model, optim, orthogonal, randalloc, schedule, sim
from .model import ConfigurationError, PrimaryBand, Scenario, SecondaryUser, SlotConfig

_GRID_TOL = 2e-3
_ANALYTIC_TOL = 1e-9

_SLOT_FIELDS = {"T", "tau", "b"}
_BAND_FIELDS = {
    "physical": {"bandwidth_W", "arrival_rate_lambda_p", "gamma_p", "sigma2_p"},
    "abstract": {"bandwidth_W", "availability_pi", "out_complement_p"},
}
_USER_FIELDS = {
    "physical": {"arrival_rate_lambda_s", "gamma_s", "sigma2_s"},
    "abstract": {"arrival_rate_lambda_s", "out_complement_row"},
}


def _r(value) -> str:
    """repr of a builtin float (numpy scalars normalized) for deterministic text output."""
    return repr(float(value))


class CliError(Exception):
    """Fatal command error; message goes to stderr, exit status 1."""


def _reject_unknown(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise CliError(f"{where}: unknown field(s) {sorted(unknown)}")


def parse_scenario_dict(doc: dict) -> Scenario:
    """Build a Scenario from a parsed document, rejecting unknown fields."""
    if not isinstance(doc, dict):
        raise CliError("scenario document must be a JSON object")
    _reject_unknown(doc, {"mode", "slot", "bands", "users"}, "scenario")
    mode = doc.get("mode")
    if mode not in ("physical", "abstract"):
        raise CliError("scenario: mode must be 'physical' or 'abstract'")
    slot_doc = doc.get("slot")
    if slot_doc is None:
        if mode == "physical":
            raise CliError("scenario: physical mode requires a slot section")
        slot = SlotConfig()
    else:
        if not isinstance(slot_doc, dict):
            raise CliError("slot: must be an object")
        _reject_unknown(slot_doc, _SLOT_FIELDS, "slot")
        try:
            slot = SlotConfig(**slot_doc)
        except ConfigurationError as exc:
            raise CliError(f"slot: {exc}") from exc
    bands_doc = doc.get("bands")
    users_doc = doc.get("users")
    if not isinstance(bands_doc, list) or not bands_doc:
        raise CliError("scenario: bands must be a non-empty list")
    if not isinstance(users_doc, list) or not users_doc:
        raise CliError("scenario: users must be a non-empty list")
    bands = []
    for j, band_doc in enumerate(bands_doc):
        where = f"bands[{j}]"
        if not isinstance(band_doc, dict):
            raise CliError(f"{where}: must be an object")
        _reject_unknown(band_doc, _BAND_FIELDS[mode], where)
        try:
            bands.append(PrimaryBand(**band_doc))
        except (ConfigurationError, TypeError) as exc:
            raise CliError(f"{where}: {exc}") from exc
    users = []
    for k, user_doc in enumerate(users_doc):
        where = f"users[{k}]"
        if not isinstance(user_doc, dict):
            raise CliError(f"{where}: must be an object")
        _reject_unknown(user_doc, _USER_FIELDS[mode], where)
        prepared = dict(user_doc)
        if "out_complement_row" in prepared:
            row = prepared["out_complement_row"]
            if not isinstance(row, list):
                raise CliError(f"{where}: out_complement_row must be a list")
            prepared["out_complement_row"] = tuple(row)
        try:
            users.append(SecondaryUser(**prepared))
        except (ConfigurationError, TypeError) as exc:
            raise CliError(f"{where}: {exc}") from exc
    try:
        scenario = Scenario(slot=slot, bands=tuple(bands), users=tuple(users))
    except ConfigurationError as exc:
        raise CliError(f"scenario: {exc}") from exc
    if scenario.mode != mode:
        raise CliError(f"scenario: entries do not match declared mode {mode!r}")
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of parse_scenario_dict (round-trip stable)."""
    doc: dict = {
        "mode": scenario.mode,
        "slot": {"T": scenario.slot.T, "tau": scenario.slot.tau, "b": scenario.slot.b},
        "bands": [],
        "users": [],
    }
    for band in scenario.bands:
        entry = {}
        for name in sorted(_BAND_FIELDS[scenario.mode]):
            value = getattr(band, name)
            if value is not None:
                entry[name] = value
        doc["bands"].append(entry)
    for user in scenario.users:
        entry = {"arrival_rate_lambda_s": user.arrival_rate_lambda_s}
        for name in sorted(_USER_FIELDS[scenario.mode] - {"arrival_rate_lambda_s"}):
            value = getattr(user, name)
            if value is not None:
                entry[name] = list(value) if isinstance(value, tuple) else value
        doc["users"].append(entry)
    return doc


def load_scenario(path: str) -> tuple[Scenario, str]:
    """Load and validate a scenario file; returns (scenario, content digest)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read scenario file: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return parse_scenario_dict(doc), digest


def _parse_grid(spec: str) -> list[float]:
    try:
        start_s, stop_s, step_s = spec.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise CliError(f"--grid must look like start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise CliError("--grid needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9))
    grid = [start + i * step for i in range(count + 1)]
    if grid[-1] < stop - 1e-9:
        grid.append(stop)
    return grid


def _parse_fixed(spec: str | None, m_s: int) -> dict[int, float]:
    """Parse --fixed '1=0.4,3=0.35' into {0-based user: rate}."""
    fixed: dict[int, float] = {}
    if not spec:
        return fixed
    for item in spec.split(","):
        try:
            user_s, rate_s = item.split("=")
            user, rate = int(user_s), float(rate_s)
        except ValueError as exc:
            raise CliError(f"--fixed entries must look like k=rate, got {item!r}") from exc
        if not 1 <= user <= m_s:
            raise CliError(f"--fixed user {user} out of range 1..{m_s}")
        if rate < 0:
            raise CliError("--fixed rates must be >= 0")
        fixed[user - 1] = rate
    return fixed


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(digest: str, seed: int | None = None) -> dict:
    prov = {"scenario_digest": digest, "tool_version": __version__}
    if seed is not None:
        prov["seed"] = seed
    return prov


def _csv_header(prov: dict) -> str:
    return "".join(f"# {key}={value}\n" for key, value in sorted(prov.items()))


def _axis_index(args_axis: int, m_s: int) -> int:
    if not 1 <= args_axis <= m_s:
        raise CliError(f"--axis user {args_axis} out of range 1..{m_s}")
    return args_axis - 1


def _sweep_user(axis: int, fixed: dict[int, float], m_s: int) -> int:
    for u in range(m_s):
        if u != axis and u not in fixed:
            return u
    raise CliError("no free user left to sweep; adjust --fixed")


def cmd_rates(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    rates = model.rate_matrix(scenario)
    if args.json:
        doc = {
            "provenance": _provenance(digest),
            "pi": [float(v) for v in rates.pi],
            "mu_p": [float(v) for v in rates.mu_p],
            "mu": [[float(v) for v in row] for row in rates.mu],
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
        return 0
    lines = [_csv_header(_provenance(digest)).rstrip("\n")]
    lines.append("pi: " + " ".join(_r(v) for v in rates.pi))
    lines.append("mu_p: " + " ".join(_r(v) for v in rates.mu_p))
    lines.append("mu (bands x users):")
    for j in range(rates.m_p):
        lines.append(f"band {j + 1}: " + " ".join(_r(v) for v in rates.mu[j]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _shat_guard(scenario: Scenario) -> None:
    if scenario.m_s != 2 or scenario.m_p > 2:
        raise CliError(
            "analytic envelope for system S_hat covers only M_s=2, M_p<=2; use simulate"
        )


def _shat_envelope_value(mu: np.ndarray, axis: int, sweep_value: float) -> float | None:
    """Union-region section for the maximized user given the swept user's rate."""
    if axis == 1:
        return randalloc.shat_section_lambda2(mu, sweep_value)
    return randalloc.shat_section_lambda2(mu[:, ::-1], sweep_value)


def _pad_one_band(mu: np.ndarray) -> np.ndarray:
    """View an M_p=1 scenario as 2x2 with a dead second band for the S_hat formulas."""
    return np.vstack([mu, np.zeros((1, mu.shape[1]))])


@dataclass(frozen=True)
class RegionReport:
    """One envelope sweep: grid of the swept user's rates and the axis user's maxima.

    ``values[i]`` is None where the grid point is infeasible; provenance always
    carries the scenario digest and tool version (plus the seed where one was
    involved).
    """

    system: str
    axis_user: int
    sweep_user: int
    grid: tuple[float, ...]
    values: tuple[float | None, ...]
    provenance: dict
    fixed: dict[int, float]

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have the same length")

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "system": self.system,
            "axis_user": self.axis_user,
            "sweep_user": self.sweep_user,
            "fixed": {str(u): r for u, r in sorted(self.fixed.items())},
            "grid": [float(g) for g in self.grid],
            "values": [None if v is None else float(v) for v in self.values],
        }

    def to_csv(self) -> str:
        lines = [
            _csv_header(self.provenance)
            + f"lambda_s{self.sweep_user},lambda_s{self.axis_user}_max,feasible"
        ]
        for g, v in zip(self.grid, self.values):
            lines.append(f"{_r(g)},{'' if v is None else _r(v)},{v is not None}")
        return "\n".join(lines) + "\n"


def _envelope_report(scenario, digest, system, axis, sweep_user, fixed, grid) -> RegionReport:
    rates = model.rate_matrix(scenario)
    others = np.zeros(scenario.m_s)
    for u, rate in fixed.items():
        others[u] = rate
    values: list[float | None] = []
    if system == "S":
        points = orthogonal.sweep_envelope(rates, axis, grid, others=others, sweep_user=sweep_user)
        values = [p.max_rate if p.feasible else None for p in points]
    elif system == "S_hat":
        _shat_guard(scenario)
        mu = rates.mu if scenario.m_p == 2 else _pad_one_band(rates.mu)
        values = [_shat_envelope_value(mu, axis, value) for value in grid]
    else:  # fixed
        for value in grid:
            lam = others.copy()
            lam[sweep_user] = value
            best = fixedalloc.best_fixed_max(rates, lam, axis)
            values.append(best[0] if best else None)
    return RegionReport(
        system=system,
        axis_user=axis + 1,
        sweep_user=sweep_user + 1,
        grid=tuple(grid),
        values=tuple(values),
        provenance=_provenance(digest),
        fixed={u + 1: r for u, r in fixed.items()},
    )


def cmd_envelope(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    fixed = _parse_fixed(args.fixed, scenario.m_s)
    axis = _axis_index(args.axis, scenario.m_s)
    if axis in fixed:
        raise CliError("--axis user cannot also be fixed")
    grid = _parse_grid(args.grid)
    sweep_user = _sweep_user(axis, fixed, scenario.m_s)
    report = _envelope_report(scenario, digest, args.system, axis, sweep_user, fixed, grid)
    if args.json:
        _emit(json.dumps(report.to_dict(), sort_keys=True) + "\n", args.out)
    else:
        _emit(report.to_csv(), args.out)
    return 0


def cmd_decompose(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    rates = model.rate_matrix(scenario)
    fixed = _parse_fixed(args.fixed, scenario.m_s)
    axis = _axis_index(args.axis, scenario.m_s)
    lam = np.zeros(scenario.m_s)
    for u, rate in fixed.items():
        lam[u] = rate
    point = orthogonal.envelope_point(rates, lam, axis)
    if not point.feasible:
        raise CliError("envelope LP infeasible at the requested fixed rates")
    padded, sched = schedule.schedule_from_assignment(point.omega_star)
    prov = _provenance(digest)
    if args.json:
        doc = {
            "provenance": prov,
            "axis_user": axis + 1,
            "max_rate": point.max_rate,
            "omega": [[float(v) for v in row] for row in point.omega_star.omega],
            "padded": [[float(v) for v in row] for row in padded.matrix.m],
            "schedule": sched.to_dict(),
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
        return 0
    lines = [_csv_header(prov).rstrip("\n")]
    lines.append(f"max lambda_s{axis + 1}: {_r(point.max_rate)}")
    lines.append("omega:")
    for row in point.omega_star.omega:
        lines.append("  " + " ".join(_r(v) for v in row))
    lines.append("padded doubly stochastic matrix:")
    for row in padded.matrix.m:
        lines.append("  " + " ".join(_r(v) for v in row))
    lines.append("schedule (band per user; 0 = idle):")
    for perm, w in sched.entries:
        lines.append(f"  {','.join(str(m) for m in perm)}  weight {_r(w)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _derive_policy(system: str, scenario: Scenario, rates: model.RateMatrix, lam: np.ndarray) -> sim.Policy:
    """Pick a concrete policy for the requested rates (see module docstring)."""
    m_p, m_s = scenario.m_p, scenario.m_s
    if system == "S":
        n = m_p * m_s
        c = np.zeros(n + 1)
        c[-1] = 1.0
        rows = []
        rhs = []
        for j in range(m_p):
            r = np.zeros(n + 1)
            r[j * m_s : (j + 1) * m_s] = 1.0
            rows.append(r)
            rhs.append(1.0)
        for l in range(m_s):
            r = np.zeros(n + 1)
            r[np.arange(m_p) * m_s + l] = 1.0
            rows.append(r)
            rhs.append(1.0)
        for l in range(m_s):
            r = np.zeros(n + 1)
            r[np.arange(m_p) * m_s + l] = -rates.mu[:, l]
            r[-1] = 1.0
            rows.append(r)
            rhs.append(-float(lam[l]))
        lo = np.zeros(n + 1)
        lo[-1] = -2.0
        hi = np.ones(n + 1)
        hi[-1] = 2.0
        sol = optim.solve_lp(optim.LpProblem(c=c, A=np.array(rows), b=np.array(rhs), lo=lo, hi=hi))
        if not sol.is_optimal:
            raise CliError(f"policy LP {sol.status}")
        omega = orthogonal.AssignmentMatrix(sol.x[:n].reshape(m_p, m_s))
        _, sched = schedule.schedule_from_assignment(omega)
        return sim.Policy.orthogonal(sched)
    if system == "S_hat":
        if m_s == 2 and m_p <= 2:
            mu = rates.mu if m_p == 2 else _pad_one_band(rates.mu)
            d1 = randalloc.dominant1_envelope_2x2(mu, float(lam[1]))
            if d1.feasible and float(lam[0]) <= d1.max_lambda:
                gamma = d1.gamma_star
            else:
                d2 = randalloc.dominant2_envelope_2x2(mu, float(lam[0]))
                if d2.feasible and float(lam[1]) <= d2.max_lambda:
                    gamma = d2.gamma_star
                elif d1.feasible:
                    gamma = d1.gamma_star
                elif d2.feasible:
                    gamma = d2.gamma_star
                else:
                    gamma = randalloc.SelectionMatrix(np.full((2, 2), 0.5))
            matrix = gamma.gamma[:m_p] if m_p < 2 else gamma.gamma
            return sim.Policy.random(randalloc.SelectionMatrix(matrix))
        return sim.Policy.random(randalloc.SelectionMatrix(np.full((m_p, m_s), 1.0 / m_p)))
    # fixed: mapping with the largest worst-case margin, lexicographic tie-break.
    if m_p < m_s:
        raise CliError("fixed system needs M_p >= M_s")
    if m_s > 8 or math.perm(m_p, m_s) > 1_000_000:
        raise CliError(f"fixed mapping search refuses M_s={m_s}, M_p={m_p}")
    best = None
    for assignment in itertools.permutations(range(1, m_p + 1), m_s):
        margin = min(float(rates.mu[assignment[k] - 1, k]) - float(lam[k]) for k in range(m_s))
        if best is None or margin > best[0]:
            best = (margin, assignment)
    return sim.Policy.fixed(fixedalloc.FixedMapping(best[1]))


def cmd_simulate(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    rates = model.rate_matrix(scenario)
    fixed = _parse_fixed(args.fixed, scenario.m_s)
    lam = np.array(scenario.arrival_rates, dtype=float)
    for u, rate in fixed.items():
        lam[u] = rate
    if np.any(lam > 1):
        raise CliError("arrival rates must lie in [0, 1] packets/slot")
    users = [
        SecondaryUser(
            arrival_rate_lambda_s=float(lam[k]),
            gamma_s=u.gamma_s,
            sigma2_s=u.sigma2_s,
            out_complement_row=u.out_complement_row,
        )
        for k, u in enumerate(scenario.users)
    ]
    scenario = Scenario(slot=scenario.slot, bands=scenario.bands, users=tuple(users))
    policy = _derive_policy(args.system, scenario, rates, lam)
    config = sim.SimConfig(n_slots=args.slots, seed=args.seed)
    result = sim.run(scenario, policy, config)
    prov = _provenance(digest, seed=args.seed)
    if args.json:
        doc = {"provenance": prov, "system": args.system, "policy": policy.kind,
               "rates": [float(v) for v in lam], "result": result.to_dict()}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
        return 0
    lines = [_csv_header(prov).rstrip("\n")]
    lines.append(f"system: {args.system} (policy {policy.kind}), slots {args.slots}, seed {args.seed}")
    lines.append("per-user arrival rates: " + " ".join(_r(v) for v in lam))
    lines.append("secondary throughput: " + " ".join(_r(v) for v in result.secondary_throughput))
    lines.append("empirical availability: " + " ".join(_r(v) for v in result.primary_empty_fraction))
    lines.append("collisions: " + str(result.collision_count))
    lines.append("primary verdicts: " + " ".join(result.verdicts_primary))
    lines.append("secondary verdicts: " + " ".join(result.verdicts_secondary))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_compare(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    if scenario.m_s != 2 or scenario.m_p != 2:
        raise CliError("compare needs a 2x2 scenario (2 bands, 2 users)")
    rates = model.rate_matrix(scenario)
    mu = rates.mu
    axis = _axis_index(args.axis, scenario.m_s) if args.axis else 1
    sweep = 1 - axis
    grid = _parse_grid(args.grid)

    reports = {
        system: _envelope_report(scenario, digest, system, axis, sweep, {}, grid)
        for system in ("S", "S_hat", "fixed")
    }
    rows = []
    violations = 0
    for idx, value in enumerate(grid):
        s_val = reports["S"].values[idx]
        shat_val = reports["S_hat"].values[idx]
        fixed_val = reports["fixed"].values[idx]
        d_sections = {}
        for mapping in ((1, 2), (2, 1)):
            m_sweep, m_axis = mapping[sweep], mapping[axis]
            ok = value <= mu[m_sweep - 1, sweep] + 1e-12
            d_sections[f"d{mapping[0]}{mapping[1]}"] = float(mu[m_axis - 1, axis]) if ok else None
        row_violations = []
        if fixed_val is not None and (shat_val is None or fixed_val > shat_val + _GRID_TOL):
            row_violations.append("fixed>S_hat")
        if shat_val is not None and (s_val is None or shat_val > s_val + _GRID_TOL):
            row_violations.append("S_hat>S")
        if fixed_val is not None and (s_val is None or fixed_val > s_val + _ANALYTIC_TOL):
            row_violations.append("fixed>S")
        violations += len(row_violations)
        rows.append((value, s_val, shat_val, fixed_val, d_sections, row_violations))

    prov = _provenance(digest)
    if args.json:
        doc = {
            "provenance": prov,
            "axis_user": axis + 1,
            "sweep_user": sweep + 1,
            "grid": grid,
            "systems": {
                "S": [r[1] for r in rows],
                "S_hat": [r[2] for r in rows],
                "fixed_best": [r[3] for r in rows],
                "fixed_d12": [r[4]["d12"] for r in rows],
                "fixed_d21": [r[4]["d21"] for r in rows],
            },
            "reports": {name: rep.to_dict() for name, rep in reports.items()},
            "violations": [r[5] for r in rows],
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    else:
        fmt = lambda v: "" if v is None else _r(v)  # noqa: E731
        lines = [
            _csv_header(prov)
            + f"lambda_s{sweep + 1},S,S_hat,fixed_best,fixed_d12,fixed_d21,violations"
        ]
        for value, s_val, shat_val, fixed_val, d_sections, row_v in rows:
            lines.append(
                f"{_r(value)},{fmt(s_val)},{fmt(shat_val)},{fmt(fixed_val)},"
                f"{fmt(d_sections['d12'])},{fmt(d_sections['d21'])},{';'.join(row_v)}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    if violations:
        print(f"containment violated at {violations} grid point(s)", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandalloc",
        description="Stability regions of cognitive-radio band-allocation systems.",
    )
    parser.add_argument("--version", action="version", version=f"bandalloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=False, axis=False, grid=False, fixed=False, sim_flags=False):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        if system:
            p.add_argument("--system", choices=["S", "S_hat", "fixed"], required=True)
        if axis:
            p.add_argument("--axis", type=int, default=None, help="maximized user (1-based)")
        if grid:
            p.add_argument("--grid", required=True, help="start:stop:step over the swept user's rate")
        if fixed:
            p.add_argument("--fixed", default=None, help="fixed rates, e.g. 1=0.4,3=0.35 (1-based)")
        if sim_flags:
            p.add_argument("--slots", type=int, default=100_000)
            p.add_argument("--seed", type=int, required=True, help="seed (randomness is never implicit)")
        p.add_argument("--json", action="store_true", help="machine-readable JSON output")
        p.add_argument("--out", default=None, help="write output to a file instead of stdout")

    p = sub.add_parser("rates", help="print mu, mu_p and pi for a scenario")
    common(p)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("envelope", help="stability envelope sweep of one system")
    common(p, system=True, axis=True, grid=True, fixed=True)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("decompose", help="optimal assignment fractions and permutation schedule")
    common(p, axis=True, fixed=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", help="slot-level Monte Carlo run")
    common(p, system=True, fixed=True, sim_flags=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="side-by-side envelopes with containment checks (2x2)")
    common(p, axis=True, grid=True)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "axis", None) is None and args.command in ("envelope", "decompose", "compare"):
        args.axis = 2
    try:
        return args.func(args)
    except (CliError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
