"""Command-line surface: experiments, reports, and the check suite.

Commands
    flow           gradient-flow trajectory (closed form or RK4 oracle)
    geodesic       exponential-geodesic trajectory with equation residuals
    lp             follow the flow to the vertex optimum and fit the rate
    isometry       root-transform isometry residuals at a given dimension
    bracket        Poisson-bracket spot checks
    integrability  commuting-integrals report (JSON)
    check-all      every module's invariant suite

Outputs are written atomically (temp file + rename).  CSV columns are
``t,p_0,...,p_{N-1},objective,residual_l1`` with shortest round-trip
number formatting; JSON mirrors carry the same fields plus a report
block.  Identical configuration and seed give byte-identical files,
modulo a JSON timestamp that ``--no-timestamp`` suppresses.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
import traceback
from dataclasses import dataclass, fields

import numpy as np

from . import checks
from .connections import e_connection_residual, make_e_geodesic
from .errors import ConfigError, ParseError, RatioOutOfRange, SimplexGeoError
from .flows import (
    LinearObjective,
    Trajectory,
    flow_closed_form,
    flow_trajectory,
    gradient_vector_field,
    integrate_rk4,
    objective_value,
    solve_lp,
)
from .hamiltonian import (
    CoordinateImag,
    CoordinateReal,
    QuadraticHamiltonian,
    integrability_suite,
    poisson_bracket,
    random_complex_point,
)
from .metrics import finsler_norm, fr_inner
from .sequence_core import (
    SequenceSpec,
    lq_norm,
    make_simplex_point,
    make_tangent,
    random_simplex_point,
    random_tangent,
)
from .transforms import RootTransform, pullback_inner, pushforward

_COMMANDS = ("flow", "geodesic", "lp", "isometry", "bracket", "integrability", "check-all")
_REQUIRED = {
    "flow": ("dim", "c_spec", "p0_spec", "t_max", "dt", "method"),
    "geodesic": ("dim", "p0_spec", "v0_spec", "t_max", "dt"),
    "lp": ("dim", "c_spec", "p0_spec", "tol"),
    "isometry": ("dim",),
    "bracket": ("dim",),
    "integrability": ("dim", "c_spec"),
    "check-all": ("dim",),
}


@dataclass
class RunConfig:
    command: str
    dim: int | None = None
    c_spec: str | None = None
    p0_spec: str | None = None
    v0_spec: str | None = None
    q: float = 2.0
    t_max: float | None = None
    dt: float | None = None
    tol: float | None = None
    method: str = "closed"
    seed: int = 0
    out_path: str | None = None
    format: str | None = None
    timestamp: bool = True

    def validate(self) -> None:
        if self.command not in _COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        missing = [f for f in _REQUIRED[self.command] if getattr(self, f) is None]
        if missing:
            raise ConfigError(
                f"command {self.command!r} is missing required fields: {', '.join(missing)}"
            )
        if self.method not in ("closed", "rk4"):
            raise ConfigError(f"method must be 'closed' or 'rk4', got {self.method!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.dim is not None and self.dim < 2:
            raise ConfigError(f"dim must be >= 2, got {self.dim}")
        for name in ("t_max", "dt", "tol"):
            val = getattr(self, name)
            if val is not None and (not math.isfinite(val) or val <= 0.0):
                raise ConfigError(f"{name} must be positive and finite, got {val}")


# ---------------------------------------------------------------------------
# sequence-spec grammar: uniform | geometric:<r> | explicit:<v1,v2,...> | file:<path>
# ---------------------------------------------------------------------------


def parse_sequence_spec(
    text: str, dim: int | None = None, normalize: str = "none"
) -> SequenceSpec:
    """Parse a spec string; ``dim``/``normalize`` come from the consuming flag."""
    if text == "uniform":
        if dim is None:
            raise ParseError(text, 0, "uniform spec needs an explicit dimension")
        return SequenceSpec("uniform", dim, normalize=normalize)
    if text.startswith("geometric:"):
        arg = text[len("geometric:") :]
        try:
            ratio = float(arg)
        except ValueError:
            raise ParseError(text, len("geometric:"), f"bad ratio {arg!r}") from None
        if not (0.0 < ratio < 1.0):
            raise RatioOutOfRange(f"geometric ratio must lie in (0, 1), got {ratio}")
        if dim is None:
            raise ParseError(text, 0, "geometric spec needs an explicit dimension")
        return SequenceSpec("geometric", dim, ratio=ratio, normalize=normalize)
    if text.startswith("explicit:"):
        body = text[len("explicit:") :]
        values = []
        offset = len("explicit:")
        for part in body.split(","):
            try:
                values.append(float(part))
            except ValueError:
                raise ParseError(text, offset, f"bad number {part!r}") from None
            offset += len(part) + 1
        if dim is not None and dim != len(values):
            raise ConfigError(f"explicit spec has {len(values)} coords but dim is {dim}")
        return SequenceSpec("explicit", len(values), coords=np.asarray(values), normalize=normalize)
    if text.startswith("file:"):
        path = text[len("file:") :]
        try:
            with open(path, encoding="utf-8") as fh:
                spec = SequenceSpec.from_json(json.load(fh))
        except OSError as exc:
            raise ParseError(text, len("file:"), f"cannot read {path!r}: {exc}") from None
        if dim is not None and spec.dim != dim:
            raise ConfigError(f"spec file has dim {spec.dim} but dim is {dim}")
        return spec
    raise ParseError(text, 0, "expected uniform | geometric:<r> | explicit:<v,..> | file:<path>")


# ---------------------------------------------------------------------------
# atomic emission
# ---------------------------------------------------------------------------


def _write_atomic(path: str, payload: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=".simplexgeo-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return repr(float(x))


def _trajectory_csv(traj: Trajectory) -> str:
    dim = traj.points[0].dim
    header = "t," + ",".join(f"p_{i}" for i in range(dim)) + ",objective,residual_l1"
    rows = [header]
    for i, t in enumerate(traj.times):
        obj = traj.objective[i] if traj.objective is not None else float("nan")
        res = traj.residual_l1[i] if traj.residual_l1 is not None else float("nan")
        cells = [_fmt(t)] + [_fmt(x) for x in traj.points[i].coords] + [_fmt(obj), _fmt(res)]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def _trajectory_json(traj: Trajectory, report: dict, with_timestamp: bool) -> str:
    payload = {
        "times": [float(t) for t in traj.times],
        "points": [[float(x) for x in p.coords] for p in traj.points],
        "objective": None
        if traj.objective is None
        else [float(x) for x in traj.objective],
        "residual_l1": None
        if traj.residual_l1 is None
        else [float(x) for x in traj.residual_l1],
        "report": report,
    }
    if with_timestamp:
        payload["timestamp"] = time.time()
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _report_json(report: dict, with_timestamp: bool) -> str:
    payload = dict(report)
    if with_timestamp:
        payload["timestamp"] = time.time()
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _default_out(cfg: RunConfig, ext: str) -> str:
    return cfg.out_path if cfg.out_path else f"{cfg.command}.{ext}"


def _emit_trajectory(cfg: RunConfig, traj: Trajectory, report: dict) -> str:
    fmt = cfg.format or "csv"
    if fmt == "csv":
        out = _default_out(cfg, "csv")
        _write_atomic(out, _trajectory_csv(traj))
    else:
        out = _default_out(cfg, "json")
        _write_atomic(out, _trajectory_json(traj, report, cfg.timestamp))
    return out


def _emit_report(cfg: RunConfig, report: dict) -> str:
    out = _default_out(cfg, "json")
    _write_atomic(out, _report_json(report, cfg.timestamp))
    return out


# ---------------------------------------------------------------------------
# command bodies: each returns (key metric string, passed, report dict)
# ---------------------------------------------------------------------------


def _grid(cfg: RunConfig) -> np.ndarray:
    n = int(round(cfg.t_max / cfg.dt))
    return cfg.dt * np.arange(n + 1)


def _cmd_flow(cfg: RunConfig) -> tuple[str, bool]:
    obj = LinearObjective(parse_sequence_spec(cfg.c_spec, cfg.dim, "none").template())
    p0 = make_simplex_point(parse_sequence_spec(cfg.p0_spec, cfg.dim, "simplex"))
    if cfg.method == "closed":
        traj = flow_trajectory(obj, p0, _grid(cfg))
    else:
        traj = integrate_rk4(gradient_vector_field(obj), p0, cfg.t_max, cfg.dt, objective=obj)
    drops = float(np.diff(traj.objective).min()) if len(traj) > 1 else 0.0
    passed = drops >= -1e-12
    report = {
        "command": "flow",
        "method": cfg.method,
        "final_objective": float(traj.objective[-1]),
        "objective_min_increment": drops,
        "rows": len(traj),
        "pass": passed,
    }
    out = _emit_trajectory(cfg, traj, report)
    return f"final_objective={traj.objective[-1]:.6g} out={out}", passed


def _cmd_geodesic(cfg: RunConfig) -> tuple[str, bool]:
    p0 = make_simplex_point(parse_sequence_spec(cfg.p0_spec, cfg.dim, "simplex"))
    v0 = make_tangent(p0, parse_sequence_spec(cfg.v0_spec, cfg.dim, "none").template())
    geo = make_e_geodesic(p0, v0)
    times = _grid(cfg)
    points = tuple(geo(t) for t in times)
    obj = None
    if cfg.c_spec:
        lin = LinearObjective(parse_sequence_spec(cfg.c_spec, cfg.dim, "none").template())
        obj = np.array([objective_value(lin, p) for p in points])
    residuals = np.array([float(np.abs(e_connection_residual(geo, t)).sum()) for t in times])
    traj = Trajectory(times, points, obj, residuals, {"method": "e-geodesic"})
    worst = float(residuals.max())
    passed = worst <= 1e-5
    report = {
        "command": "geodesic",
        "max_residual_l1": worst,
        "rows": len(traj),
        "pass": passed,
    }
    out = _emit_trajectory(cfg, traj, report)
    return f"max_residual_l1={worst:.3e} out={out}", passed


def _cmd_lp(cfg: RunConfig) -> tuple[str, bool]:
    obj = LinearObjective(parse_sequence_spec(cfg.c_spec, cfg.dim, "none").template())
    p0 = make_simplex_point(parse_sequence_spec(cfg.p0_spec, cfg.dim, "simplex"))
    limit, report = solve_lp(obj, p0, cfg.tol)
    rate_ok = report.rate_rel_err is None or report.rate_rel_err <= 0.05
    passed = report.converged and report.advisory is None and rate_ok
    payload = report.to_dict()
    payload["command"] = "lp"
    payload["limit"] = [float(x) for x in limit.coords]
    payload["objective_at_limit"] = objective_value(obj, limit)
    payload["pass"] = passed
    if (cfg.format or "json") == "csv":
        times = np.array([t for t, _ in report.probes])
        points = tuple(flow_closed_form(obj, p0, t) for t, _ in report.probes)
        values = np.array([objective_value(obj, p) for p in points])
        residuals = np.array([d for _, d in report.probes])
        out = _emit_trajectory(cfg, Trajectory(times, points, values, residuals), payload)
    else:
        out = _emit_report(cfg, payload)
    rate = "none" if report.rate is None else f"{report.rate:.4g}"
    return f"converged={report.converged} rate={rate} out={out}", passed


def _cmd_isometry(cfg: RunConfig) -> tuple[str, bool]:
    rng = np.random.default_rng(cfg.seed)
    T = RootTransform(2.0)
    Tq = RootTransform(cfg.q)
    worst_iso = 0.0
    worst_q = 0.0
    for _ in range(50):
        p = random_simplex_point(rng, cfg.dim)
        v = random_tangent(rng, p)
        w = random_tangent(rng, p)
        fr = fr_inner(v, w)
        worst_iso = max(worst_iso, abs(fr - pullback_inner(T, v, w)) / max(1.0, abs(fr)))
        lhs = lq_norm(pushforward(Tq, v).comps, cfg.q)
        rhs = finsler_norm(v, cfg.q) / cfg.q
        worst_q = max(worst_q, abs(lhs - rhs) / max(rhs, 1e-30))
    passed = worst_iso <= 1e-12 and worst_q <= 1e-10
    report = {
        "command": "isometry",
        "dim": cfg.dim,
        "q": cfg.q,
        "isometry_rel_residual": worst_iso,
        "q_identity_rel_residual": worst_q,
        "seed": cfg.seed,
        "pass": passed,
    }
    out = _emit_report(cfg, report)
    return f"isometry_residual={worst_iso:.3e} q_residual={worst_q:.3e} out={out}", passed


def _cmd_bracket(cfg: RunConfig) -> tuple[str, bool]:
    rng = np.random.default_rng(cfg.seed)
    z = random_complex_point(rng, cfg.dim)
    canonical = poisson_bracket(CoordinateReal(0), CoordinateImag(0), z)
    c = rng.uniform(0.5, 3.0, size=cfg.dim)
    analytic_max = 0.0
    numeric_max = 0.0
    for k in range(cfg.dim):
        for m in range(k + 1, cfg.dim):
            hk = QuadraticHamiltonian(np.eye(cfg.dim)[k] * c[k])
            hm = QuadraticHamiltonian(np.eye(cfg.dim)[m] * c[m])
            analytic_max = max(analytic_max, abs(poisson_bracket(hk, hm, z)))
            numeric_max = max(numeric_max, abs(poisson_bracket(hk, hm, z, numeric=True)))
    passed = analytic_max == 0.0 and numeric_max <= 1e-8 and abs(canonical - 1.0) <= 1e-10
    report = {
        "command": "bracket",
        "dim": cfg.dim,
        "canonical_pair": canonical,
        "analytic_max_abs": analytic_max,
        "numeric_max_abs": numeric_max,
        "seed": cfg.seed,
        "pass": passed,
    }
    out = _emit_report(cfg, report)
    return f"canonical={canonical:.12g} numeric_max={numeric_max:.3e} out={out}", passed


def _cmd_integrability(cfg: RunConfig) -> tuple[str, bool]:
    c = parse_sequence_spec(cfg.c_spec, cfg.dim, "none").template()
    report = integrability_suite(c, trials=10, seed=cfg.seed)
    out = _emit_report(cfg, report)
    return (
        f"brackets_max_abs={report['brackets_max_abs']:.3e} "
        f"gram_det={report['gram_det']:.3e} out={out}"
    ), bool(report["pass"])


def _cmd_check_all(cfg: RunConfig) -> tuple[str, bool]:
    results = checks.check_all(cfg.dim, cfg.seed)
    for res in results:
        print(res.line())
    passed = all(r.passed for r in results)
    report = {
        "command": "check-all",
        "dim": cfg.dim,
        "seed": cfg.seed,
        "results": [
            {"name": r.name, "value": r.value, "threshold": r.threshold, "pass": r.passed}
            for r in results
        ],
        "pass": passed,
    }
    if cfg.out_path:
        _emit_report(cfg, report)
    n_fail = sum(not r.passed for r in results)
    return f"checks={len(results)} failures={n_fail}", passed


_BODIES = {
    "flow": _cmd_flow,
    "geodesic": _cmd_geodesic,
    "lp": _cmd_lp,
    "isometry": _cmd_isometry,
    "bracket": _cmd_bracket,
    "integrability": _cmd_integrability,
    "check-all": _cmd_check_all,
}


def _blame(exc: BaseException) -> str:
    """Locate the deepest package frame, for module-and-operation context."""
    pkg_dir = os.path.dirname(os.path.abspath(__file__))
    where = "simplexgeo"
    for frame in traceback.extract_tb(exc.__traceback__):
        if os.path.dirname(os.path.abspath(frame.filename)) == pkg_dir:
            module = os.path.splitext(os.path.basename(frame.filename))[0]
            where = f"simplexgeo.{module}.{frame.name}"
    return where


def run(cfg: RunConfig) -> int:
    """Execute one configured command; 0 pass, 1 failure, 2 config error."""
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        metric, passed = _BODIES[cfg.command](cfg)
    except (ConfigError, ParseError, RatioOutOfRange) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimplexGeoError as exc:
        print(f"{cfg.command} dim={cfg.dim} error in {_blame(exc)}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{cfg.command} dim={cfg.dim} output error: {exc}", file=sys.stderr)
        return 1
    status = "pass" if passed else "FAIL"
    print(f"{cfg.command} dim={cfg.dim} {metric} {status}")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexgeo",
        description="Fisher-Rao flows and geometry on truncated probability simplices",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--dim", type=int)
        p.add_argument("--c", dest="c_spec")
        p.add_argument("--p0", dest="p0_spec")
        p.add_argument("--v0", dest="v0_spec")
        p.add_argument("--q", type=float)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--method", choices=("closed", "rk4"))
        p.add_argument("--seed", type=int)
        p.add_argument("--out", dest="out_path")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--no-timestamp", action="store_true")
        p.add_argument("--config", dest="config_path")
    return parser


def config_from_args(argv: list[str]) -> RunConfig:
    args = _build_parser().parse_args(argv)
    file_values: dict = {}
    if args.config_path:
        try:
            with open(args.config_path, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config_path!r}: {exc}") from None
        unknown = set(file_values) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(command=args.command)
    for f in fields(RunConfig):
        if f.name in ("command", "timestamp"):
            continue
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            setattr(cfg, f.name, cli_value)
        elif f.name in file_values:
            setattr(cfg, f.name, file_values[f.name])
    env_seed = os.environ.get("SIMPLEXGEO_SEED")
    if args.seed is None and "seed" not in file_values and env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"SIMPLEXGEO_SEED={env_seed!r} is not an integer") from None
    if args.no_timestamp:
        cfg.timestamp = False
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
