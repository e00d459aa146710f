"""Command-line pipeline: estimate | taubar | bounds | breakdown | info |
lopo | corrmap | benchmark | simulate.

Commands share a YAML config; every field can be overridden with repeatable
``--set section.key=value`` flags, and ``--seed``, ``--jobs``, ``--out`` are
global shortcuts.  Each artifact records a hash of the identification-
relevant config sections (data, var, restrictions, tau); downstream commands
refuse artifacts whose hash does not match the active config.

Exit codes: 0 success, 2 validation error, 3 solver infeasibility at every
requested quality level.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from .bounds import SolverConfig, sweep
from .diagnostics import Claim, breakdown_value, correlation_map, lopo, zoo_information
from .dgp import DgpSpec, ProxyPlan, simulate
from .exceptions import InfeasibleRegionError, ValidationError
from .io import load_panel, load_proxies, write_panel, write_series, _load_raw_series
from .quality import cstar_grid_oracle, solve_cstar
from .reduced_form import ReducedForm, VarSpec, estimate_var
from .restrictions import SignRestrictionSpec, compile_sign

__all__ = ["main", "load_config", "config_hash"]

HASHED_SECTIONS = ("data", "var", "restrictions", "tau")


# ----------------------------------------------------------------- config


def _set_path(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ValidationError(f"cannot override through non-mapping key {k!r}")
    node[keys[-1]] = value


def load_config(path=None, overrides=(), seed=None, jobs=None, out=None) -> dict:
    cfg: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ValidationError(f"config file not found: {p}")
        with open(p) as fh:
            cfg = yaml.safe_load(fh) or {}
        if not isinstance(cfg, dict):
            raise ValidationError("config root must be a mapping")
    for item in overrides or ():
        if "=" not in item:
            raise ValidationError(f"--set expects key.path=value, got {item!r}")
        key, raw = item.split("=", 1)
        _set_path(cfg, key.strip(), yaml.safe_load(raw))
    if seed is not None:
        _set_path(cfg, "solver.seed", int(seed))
    if jobs is not None:
        _set_path(cfg, "solver.jobs", int(jobs))
    if out is not None:
        _set_path(cfg, "output.dir", str(out))
    return cfg


def config_hash(cfg: dict) -> str:
    payload = {k: cfg.get(k) for k in HASHED_SECTIONS if cfg.get(k) is not None}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _outdir(cfg: dict) -> Path:
    out = Path(cfg.get("output", {}).get("dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if obj is math.inf:
        return "inf"
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path: Path, obj: dict) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, default=_json_default, allow_nan=True) + "\n")


def write_csv(path: Path, rows, fieldnames, cfg_hash: str) -> None:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, float):
            if math.isnan(v):
                return ""
            if math.isinf(v):
                return "inf"
            return f"{v:.12g}"
        return str(v)

    lines = [f"# config_hash={cfg_hash}", ",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(fmt(row.get(f)) for f in fieldnames))
    _atomic_write(path, "\n".join(lines) + "\n")


def _read_artifact(path: Path, expected_hash: str) -> dict:
    if not path.exists():
        raise ValidationError(
            f"missing prerequisite artifact {path.name}: run the producing command first"
        )
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("config_hash") != expected_hash:
        raise ValidationError(
            f"artifact {path.name} was produced under a different configuration "
            f"({doc.get('config_hash')} != {expected_hash}); refusing mixed provenance"
        )
    return doc


# ----------------------------------------------------------- shared pieces


def _solver_cfg(cfg: dict) -> SolverConfig:
    s = cfg.get("solver", {}) or {}
    return SolverConfig(
        restarts=int(s.get("restarts", 20)),
        seed=int(s.get("seed", 0)),
        feas_tol=float(s.get("feas_tol", 1e-6)),
        ftol=float(s.get("ftol", 1e-8)),
        maxiter=int(s.get("maxiter", 2000)),
        aligned_starts=bool(s.get("aligned_starts", True)),
        polish_infeasible=bool(s.get("polish_infeasible", True)),
        jobs=int(s.get("jobs", 1)),
    )


def _var_spec(cfg: dict) -> VarSpec:
    v = cfg.get("var", {}) or {}
    return VarSpec(
        lag_order=int(v.get("lags", 1)),
        include_constant=bool(v.get("constant", True)),
        horizon=int(v.get("horizon", 24)),
    )


def _load_rf(cfg: dict, outdir: Path) -> tuple[ReducedForm, str]:
    h = config_hash(cfg)
    doc = _read_artifact(outdir / "reduced_form.json", h)
    return ReducedForm.from_json_dict(doc["reduced_form"]), h


def _sign_spec(cfg: dict, rf: ReducedForm) -> SignRestrictionSpec:
    rcfg = cfg.get("restrictions", {}) or {}

    def resolve(v):
        if isinstance(v, str):
            try:
                return rf.names.index(v)
            except ValueError:
                raise ValidationError(f"unknown variable {v!r}") from None
        return int(v)

    return SignRestrictionSpec.from_config(rcfg, resolve_variable=resolve)


def _tau_grid(cfg: dict, outdir: Path, cfg_hash: str) -> list:
    t = cfg.get("tau", {}) or {}
    if "grid" in t:
        grid = [float(x) for x in t["grid"]]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("tau.grid must be strictly ascending")
        return grid
    points = int(t.get("points", 25))
    cap = t.get("cap")
    taubar_path = outdir / "taubar.json"
    if taubar_path.exists():
        doc = _read_artifact(taubar_path, cfg_hash)
        tb = doc.get("tau_bar")
        if tb not in (None, "inf"):
            cap = float(tb)
    if cap is None:
        raise ValidationError("set tau.grid, tau.cap, or run taubar first")
    cap = float(cap)
    if cap <= 0:
        raise ValidationError("tau cap must be positive")
    return [0.0] + list(np.geomspace(cap * 1e-2, cap, points))


def _bounds_cells(cfg: dict, rf: ReducedForm):
    b = cfg.get("bounds", {}) or {}
    variables = b.get("variables")
    if variables is not None:
        variables = [rf.names.index(v) if isinstance(v, str) else int(v) for v in variables]
    horizons = b.get("horizons")
    if horizons is not None:
        if isinstance(horizons, list) and len(horizons) == 2:
            horizons = list(range(int(horizons[0]), int(horizons[1]) + 1))
        else:
            horizons = [int(h) for h in np.atleast_1d(horizons)]
    return variables, horizons


# ---------------------------------------------------------------- commands


def cmd_estimate(cfg: dict) -> int:
    outdir = _outdir(cfg)
    h = config_hash(cfg)
    data = cfg.get("data", {}) or {}
    if "panel" not in data:
        raise ValidationError("config needs data.panel")
    panel = load_panel(data["panel"], date_column=data.get("date_column"))
    rf = estimate_var(panel, _var_spec(cfg))
    policy = data.get("missing_policy", "zero")
    labels = []
    if data.get("proxies"):
        proxies = load_proxies(data["proxies"], panel, policy)
        rf = rf.with_proxy_moments(proxies, policy)
        labels = [s.label for s in proxies]
    doc = {
        "config_hash": h,
        "n": rf.n,
        "p": rf.p,
        "k": rf.k,
        "proxy_labels": labels,
        "stable": rf.stable,
        "reduced_form": rf.to_json_dict(),
    }
    write_json(outdir / "reduced_form.json", doc)
    print(f"estimate: n={rf.n} p={rf.p} k={rf.k} stable={rf.stable} config_hash={h}")
    return 0


def cmd_taubar(cfg: dict, with_oracle: bool = False) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    if rf.k == 0:
        raise ValidationError("taubar needs proxies: re-run estimate with data.proxies")
    sign = compile_sign(_sign_spec(cfg, rf), rf)
    result = solve_cstar(rf.M, sign, solver_cfg=_solver_cfg(cfg))
    gap = None
    if with_oracle and rf.n <= 3:
        c_grid, _ = cstar_grid_oracle(rf.M, sign)
        gap = result.c_star_raw - c_grid
        result = replace(result, oracle_gap=float(gap))
    doc = {
        "config_hash": h,
        "c_star": result.c_star,
        "c_star_raw": result.c_star_raw,
        "tau_bar": "inf" if math.isinf(result.tau_bar) else result.tau_bar,
        "arg_q": result.arg_q.tolist(),
        "proxy_angles": list(result.angles),
        "oracle_gap": gap,
    }
    write_json(outdir / "taubar.json", doc)
    print(f"taubar: c_star={result.c_star:.6f} tau_bar={doc['tau_bar']} config_hash={h}")
    return 0


def cmd_bounds(cfg: dict) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    grid_taus = _tau_grid(cfg, outdir, h)
    variables, horizons = _bounds_cells(cfg, rf)
    grid = sweep(rf, _sign_spec(cfg, rf), grid_taus, variables=variables,
                 horizons=horizons, solver_cfg=_solver_cfg(cfg))
    write_csv(
        outdir / "bounds.csv",
        grid.to_rows(),
        ["variable", "horizon", "tau", "lower", "upper", "empty_flag", "violation", "width_flag"],
        h,
    )
    summary = grid.summary_dict()
    summary["config_hash"] = h
    write_json(outdir / "bounds_summary.json", summary)
    print(
        f"bounds: {len(grid.variables)} variables x {len(grid.horizons)} horizons x "
        f"{len(grid.tau_grid)} taus, empty={summary['n_empty_cells']} config_hash={h}"
    )
    if grid.empty.all():
        print("bounds: identified set empty at every requested tau", file=sys.stderr)
        return 3
    return 0


def cmd_breakdown(cfg: dict, claims_path) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    if claims_path is None:
        raise ValidationError("breakdown needs --claims pointing to a claims file")
    p = Path(claims_path)
    if not p.exists():
        raise ValidationError(f"claims file not found: {p}")
    with open(p) as fh:
        claims_cfg = yaml.safe_load(fh) or {}
    entries = claims_cfg.get("claims", claims_cfg if isinstance(claims_cfg, list) else [])
    if not entries:
        raise ValidationError("no claims found in the claims file")

    def resolve(v):
        return rf.names.index(v) if isinstance(v, str) else int(v)

    spec = _sign_spec(cfg, rf)
    taus = _tau_grid(cfg, outdir, h)
    scfg = _solver_cfg(cfg)
    rows = []
    results = {}
    for entry in entries:
        claim = Claim.from_config(entry, resolve_variable=resolve)
        res = breakdown_value(claim, rf, spec, taus, solver_cfg=scfg)
        name = claim.name or claim.kind
        rows.append({
            "claim": name,
            "kind": claim.kind,
            "tau_star": res.tau_star if res.supported else None,
            "supported": int(res.supported),
            "vacuous": int(res.vacuous),
            "evaluations": len(res.grid_evaluations),
        })
        results[name] = {
            "tau_star": res.tau_star if res.supported else "NOT_SUPPORTED",
            "supported": res.supported,
            "vacuous": res.vacuous,
            "grid_evaluations": [[t, bool(ok)] for t, ok in res.grid_evaluations],
        }
    write_csv(outdir / "breakdown.csv", rows,
              ["claim", "kind", "tau_star", "supported", "vacuous", "evaluations"], h)
    write_json(outdir / "breakdown.json", {"config_hash": h, "claims": results})
    for row in rows:
        star = row["tau_star"]
        print(f"breakdown: {row['claim']} tau_star="
              f"{'NOT_SUPPORTED' if star is None else f'{star:.4g}'} config_hash={h}")
    return 0


def _info_grids(cfg: dict, rf: ReducedForm, tau: float):
    variables, horizons = _bounds_cells(cfg, rf)
    spec = _sign_spec(cfg, rf)
    scfg = _solver_cfg(cfg)
    sign_grid = sweep(replace(rf, M=()), spec, [0.0], variables=variables,
                      horizons=horizons, solver_cfg=scfg)
    full_grid = sweep(rf, spec, [tau], variables=variables, horizons=horizons, solver_cfg=scfg)
    return full_grid, sign_grid


def _pick_tau(cfg: dict, outdir: Path, h: str, tau_flag) -> float:
    if tau_flag is not None:
        return float(tau_flag)
    return float(_tau_grid(cfg, outdir, h)[-1])


def cmd_info(cfg: dict, tau_flag=None) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    tau = _pick_tau(cfg, outdir, h, tau_flag)
    full_grid, sign_grid = _info_grids(cfg, rf, tau)
    report = zoo_information(full_grid, sign_grid, tau)
    rows = []
    for vi, v in enumerate(report.variables):
        name = rf.names[v] if rf.names else str(v)
        for hi, hz in enumerate(report.horizons):
            rows.append({
                "variable": name,
                "horizon": hz,
                "kappa": float(report.kappa_cells[vi, hi]),
            })
    write_csv(outdir / "info_cells.csv", rows, ["variable", "horizon", "kappa"], h)
    write_json(outdir / "info.json", {
        "config_hash": h,
        "tau": tau,
        "kappa": report.kappa_full,
        "excluded_cells": report.excluded_cells,
        "empty_cells": report.empty_cells,
    })
    print(f"info: kappa={report.kappa_full:.4f} at tau={tau:.4g} config_hash={h}")
    return 0


def cmd_lopo(cfg: dict, tau_flag=None) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    tau = _pick_tau(cfg, outdir, h, tau_flag)
    doc = _read_artifact(outdir / "reduced_form.json", h)
    labels = doc.get("proxy_labels") or None
    variables, horizons = _bounds_cells(cfg, rf)
    report = lopo(rf, _sign_spec(cfg, rf), tau, variables=variables, horizons=horizons,
                  solver_cfg=_solver_cfg(cfg), labels=labels)
    rows = [
        {
            "proxy": lab,
            "kappa_without": kw,
            "delta": d,
            "delta_raw": draw,
            "caveat": int(cav),
        }
        for lab, kw, d, draw, cav in zip(
            report.labels, report.kappa_without, report.deltas, report.deltas_raw, report.caveat
        )
    ]
    write_csv(outdir / "lopo.csv", rows,
              ["proxy", "kappa_without", "delta", "delta_raw", "caveat"], h)
    write_json(outdir / "lopo.json", {
        "config_hash": h,
        "tau": tau,
        "kappa_full": report.kappa_full,
        "proxies": rows,
    })
    print(f"lopo: kappa_full={report.kappa_full:.4f} at tau={tau:.4g} config_hash={h}")
    return 0


def cmd_corrmap(cfg: dict, other_paths=None) -> int:
    outdir = _outdir(cfg)
    h = config_hash(cfg)
    data = cfg.get("data", {}) or {}
    if not data.get("proxies"):
        raise ValidationError("corrmap needs data.proxies")
    series_a = [_load_raw_series(p) for p in data["proxies"]]
    series_b = [_load_raw_series(p) for p in other_paths] if other_paths else None
    cmap = correlation_map(series_a, series_b)
    write_csv(outdir / "corrmap.csv", cmap.to_rows(),
              ["proxy_a", "proxy_b", "corr", "p_value", "n_obs", "bucket"], h)
    write_json(outdir / "corrmap.json", {
        "config_hash": h,
        "labels_a": list(cmap.labels_a),
        "labels_b": list(cmap.labels_b),
        "corr": cmap.corr.tolist(),
        "p_value": cmap.p_value.tolist(),
    })
    print(f"corrmap: {len(cmap.labels_a)} x {len(cmap.labels_b)} pairs config_hash={h}")
    return 0


def cmd_benchmark(cfg: dict, proxy_label=None) -> int:
    outdir = _outdir(cfg)
    rf, h = _load_rf(cfg, outdir)
    bench = cfg.get("benchmark", {}) or {}
    label = proxy_label or bench.get("proxy")
    doc = _read_artifact(outdir / "reduced_form.json", h)
    labels = doc.get("proxy_labels") or [f"m{i + 1}" for i in range(rf.k)]
    if label is None:
        raise ValidationError("benchmark needs --proxy or benchmark.proxy")
    try:
        ell = labels.index(label)
    except ValueError:
        raise ValidationError(f"unknown proxy {label!r}; have {labels}") from None

    M = np.asarray(rf.M[ell], dtype=float)
    qhat = M / np.linalg.norm(M)
    variables, horizons = _bounds_cells(cfg, rf)
    variables = variables if variables is not None else list(range(rf.n))
    horizons = horizons if horizons is not None else list(range(rf.horizon + 1))
    point = np.array([[float(rf.irf_vector(v, hz) @ qhat) for hz in horizons] for v in variables])

    scale = 1.0
    norm_cfg = bench.get("normalize")
    if norm_cfg:
        v0 = norm_cfg["variable"]
        v0 = rf.names.index(v0) if isinstance(v0, str) else int(v0)
        target = float(norm_cfg.get("value", 1.0))
        impact = point[variables.index(v0), horizons.index(0)]
        if impact == 0:
            raise ValidationError("cannot normalize: zero impact response for the chosen variable")
        scale = target / impact

    taus = _tau_grid(cfg, outdir, h)
    grid = sweep(rf, _sign_spec(cfg, rf), taus, variables=variables, horizons=horizons,
                 solver_cfg=_solver_cfg(cfg))
    rows = []
    for vi, v in enumerate(variables):
        name = rf.names[v] if rf.names else str(v)
        for hi, hz in enumerate(horizons):
            for ti, tau in enumerate(grid.tau_grid):
                lo = grid.lower[vi, hi, ti] * scale
                up = grid.upper[vi, hi, ti] * scale
                if scale < 0:
                    lo, up = up, lo
                rows.append({
                    "variable": name,
                    "horizon": hz,
                    "tau": tau,
                    "lower": lo,
                    "upper": up,
                    "point": point[vi, hi] * scale,
                    "empty_flag": int(grid.empty[vi, hi, ti]),
                })
    write_csv(outdir / "benchmark.csv", rows,
              ["variable", "horizon", "tau", "lower", "upper", "point", "empty_flag"], h)
    print(f"benchmark: proxy={label} cells={len(rows)} config_hash={h}")
    return 0


def _random_dgp_matrices(n: int, p: int, rng: np.random.Generator):
    for _ in range(64):
        A = [rng.standard_normal((n, n)) * (0.5 / p) for _ in range(p)]
        from .reduced_form import companion_matrix

        lam = np.max(np.abs(np.linalg.eigvals(companion_matrix(A))))
        if lam >= 0.95:
            A = [a * (0.9 / lam / 1.2) for a in A]
        B0 = rng.standard_normal((n, n)) * 0.4 + np.eye(n)
        if abs(np.linalg.det(B0)) > 1e-3:
            try:
                DgpSpec(n=n, p=p, T=10 * n * p + 10, seed=0, A=tuple(A), B0=B0)
                return tuple(A), B0
            except ValidationError:
                continue
    raise ValidationError("could not draw a stable random DGP")


def cmd_simulate(cfg: dict) -> int:
    outdir = _outdir(cfg)
    sim = cfg.get("simulate", {}) or {}
    for key in ("n", "T"):
        if key not in sim:
            raise ValidationError(f"simulate needs simulate.{key}")
    n = int(sim["n"])
    p = int(sim.get("p", 1))
    T = int(sim["T"])
    seed = int(sim.get("seed", cfg.get("solver", {}).get("seed", 0)))
    rng = np.random.default_rng(seed)
    if sim.get("A") in (None, "random") or sim.get("B0") in (None, "random"):
        A, B0 = _random_dgp_matrices(n, p, rng)
        if sim.get("A") not in (None, "random"):
            A = tuple(np.array(a, dtype=float) for a in sim["A"])
        if sim.get("B0") not in (None, "random"):
            B0 = np.array(sim["B0"], dtype=float)
    else:
        A = tuple(np.array(a, dtype=float) for a in sim["A"])
        B0 = np.array(sim["B0"], dtype=float)
    plans = tuple(
        ProxyPlan(
            target_corr=float(e["target_corr"]),
            contamination=tuple(float(c) for c in e.get("contamination", [0.0] * (n - 1))),
            noise_var=float(e.get("noise_var", 1.0)),
        )
        for e in sim.get("proxies", [])
    )
    spec = DgpSpec(n=n, p=p, T=T, seed=seed, A=A, B0=B0, proxy_plans=plans,
                   burn_in=int(sim.get("burn_in", 200)))
    panel, proxies, truth = simulate(spec)
    write_panel(panel, outdir / "panel.csv")
    proxy_paths = []
    for s in proxies:
        path = outdir / f"proxy_{s.label}.csv"
        write_series(s, path)
        proxy_paths.append(str(path))
    sim_hash = hashlib.sha256(
        json.dumps(sim, sort_keys=True, default=str).encode()
    ).hexdigest()[:16]
    write_json(outdir / "truth.json", {
        "config_hash": sim_hash,
        "n": n,
        "p": p,
        "T": T,
        "seed": seed,
        "B0": truth.B0.tolist(),
        "O0": truth.O0.tolist(),
        "L0": truth.L0.tolist(),
        "A": [a.tolist() for a in truth.A],
        "tau0": [("inf" if math.isinf(t) else t) for t in truth.tau0],
        "irf_shock1": truth.irf(int(sim.get("truth_horizon", 24))).tolist(),
    })
    print(
        f"simulate: wrote panel.csv ({T} x {n}), {len(proxies)} proxies, truth.json "
        f"config_hash={sim_hash}"
    )
    return 0


# ------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxyzoo",
        description="Set-identified proxy-SVAR bounds under ranking restrictions",
    )
    parser.add_argument("-c", "--config", help="YAML config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config field (repeatable)")
    parser.add_argument("--seed", type=int, help="solver seed")
    parser.add_argument("--jobs", type=int, help="parallel workers")
    parser.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("estimate", help="estimate the reduced form and proxy moments")
    p_taubar = sub.add_parser("taubar", help="upper bound on the proxy quality parameter")
    p_taubar.add_argument("--oracle", action="store_true",
                          help="also run the sphere-grid oracle (n <= 3)")
    sub.add_parser("bounds", help="identified-set bounds over the tau grid")
    p_break = sub.add_parser("breakdown", help="breakdown values for claims")
    p_break.add_argument("--claims", help="YAML file with a 'claims' list")
    p_info = sub.add_parser("info", help="proxy-zoo information kappa")
    p_info.add_argument("--tau", type=float, help="quality level (default: top of grid)")
    p_lopo = sub.add_parser("lopo", help="leave-one-proxy-out information deltas")
    p_lopo.add_argument("--tau", type=float, help="quality level (default: top of grid)")
    p_corr = sub.add_parser("corrmap", help="pairwise correlation-significance map")
    p_corr.add_argument("--other", nargs="*", help="CSV paths for the comparison proxy set")
    p_bench = sub.add_parser("benchmark", help="point-identified IRF vs bounds")
    p_bench.add_argument("--proxy", help="label of the proxy treated as a valid instrument")
    sub.add_parser("simulate", help="write synthetic panel, proxies, and ground truth")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set, seed=args.seed, jobs=args.jobs, out=args.out)
        if args.command == "estimate":
            return cmd_estimate(cfg)
        if args.command == "taubar":
            return cmd_taubar(cfg, with_oracle=args.oracle)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        if args.command == "breakdown":
            return cmd_breakdown(cfg, args.claims)
        if args.command == "info":
            return cmd_info(cfg, args.tau)
        if args.command == "lopo":
            return cmd_lopo(cfg, args.tau)
        if args.command == "corrmap":
            return cmd_corrmap(cfg, args.other)
        if args.command == "benchmark":
            return cmd_benchmark(cfg, args.proxy)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        raise ValidationError(f"unknown command {args.command!r}")
    except (ValidationError, InfeasibleRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
