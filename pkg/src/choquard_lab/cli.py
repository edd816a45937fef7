"""Batch entry point: parameter gating, solver runs, verification, artifacts.

Exit-code contract: 0 = success, 1 = scientific failure (nonconvergence or a
failed check), 2 = usage/config failure.  Reports are byte-deterministic for
a fixed config and seed; wall-clock metadata goes to a separate file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

from . import analysis
from .grid import Field, Grid, set_fft_workers, write_field
from .params import ProblemParams, check_h1, check_h2, find_thetas
from .solvers import (
    SolveConfig,
    boundary_peak_ratio,
    solve_picard,
    solve_scalar,
    solve_system,
)

BOUNDARY_DECAY_LIMIT = 1e-10

_PARAM_KEYS = {"N", "alpha", "p", "q", "tau", "eta"}
_GRID_KEYS = {"L", "n"}
_SOLVE_KEYS = {"max_iters", "tol_residual", "step0", "backtrack", "seed", "init_asymmetry"}
_VERIFY_KEYS = {"multistart", "tau_factor", "region_resolution"}
_SECTION_KEYS = {"params": _PARAM_KEYS, "grid": _GRID_KEYS, "solve": _SOLVE_KEYS, "verify": _VERIFY_KEYS}


class ConfigError(Exception):
    """Malformed configuration; maps to exit code 2."""


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - set(_SECTION_KEYS)
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    for section, allowed in _SECTION_KEYS.items():
        body = raw.get(section, {})
        if not isinstance(body, dict):
            raise ConfigError(f"config section '{section}' must be an object")
        bad = set(body) - allowed
        if bad:
            raise ConfigError(f"unknown key(s) in '{section}': {', '.join(sorted(bad))}")
    return raw


def _require_field(section: dict, section_name: str, key: str):
    if key not in section:
        raise ConfigError(f"missing field '{key}' in section '{section_name}'")
    return section[key]


def _build_params(cfg: dict) -> ProblemParams:
    section = cfg.get("params", {})
    try:
        return ProblemParams(
            N=int(_require_field(section, "params", "N")),
            alpha=float(_require_field(section, "params", "alpha")),
            p=float(_require_field(section, "params", "p")),
            q=float(_require_field(section, "params", "q")),
            tau=float(section.get("tau", 1.0)),
            eta=float(section.get("eta", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid params section: {exc}") from exc


def _build_grid(cfg: dict, params: ProblemParams) -> Grid:
    section = cfg.get("grid", {})
    try:
        return Grid(
            N=params.N,
            L=float(_require_field(section, "grid", "L")),
            n=int(_require_field(section, "grid", "n")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grid section: {exc}") from exc


def _build_solve_config(cfg: dict, seed_override: int | None) -> tuple[SolveConfig, float]:
    section = dict(cfg.get("solve", {}))
    asymmetry = float(section.pop("init_asymmetry", 0.3))
    if seed_override is not None:
        section["seed"] = seed_override
    try:
        config = SolveConfig(
            max_iters=int(section.get("max_iters", 500)),
            tol_residual=float(section.get("tol_residual", 1e-8)),
            step0=float(section.get("step0", 1.0)),
            backtrack=float(section.get("backtrack", 0.5)),
            seed=int(section.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid solve section: {exc}") from exc
    return config, asymmetry


def _json_dump(data: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_meta(out: Path, argv: list[str]) -> None:
    _json_dump(
        {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "argv": argv},
        out / "run_meta.json",
    )


def _emit_boundary_warning(name: str, f: Field) -> bool:
    ratio = boundary_peak_ratio(f)
    if ratio > BOUNDARY_DECAY_LIMIT:
        print(
            f"warning: {name} boundary value is {ratio:.3e} of its peak "
            f"(> {BOUNDARY_DECAY_LIMIT}); enlarge the box half-width L",
            file=sys.stderr,
        )
        return True
    return False


# -- subcommands ----------------------------------------------------------------


def cmd_params(args) -> int:
    cfg = _load_config(args.config)
    params = _build_params(cfg)
    h1 = check_h1(params)
    h2 = check_h2(params)
    verdict = {
        "params": dataclasses.asdict(params),
        "h1": {"ok": h1.ok, "violated": list(h1.violated)},
        "h2": {"ok": h2.ok, "violated": list(h2.violated)},
    }
    if h1:
        pair = find_thetas(params)
        verdict["thetas"] = {"theta1": pair.theta1, "theta2": pair.theta2}
    else:
        verdict["thetas"] = None
    print(json.dumps(verdict, indent=2, sort_keys=True))
    if args.require == "h1" and not h1:
        return 1
    if args.require == "h2" and not h2:
        return 1
    return 0


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    params = _build_params(cfg)
    grid = _build_grid(cfg, params)
    config, asymmetry = _build_solve_config(cfg, args.seed)
    verdict = check_h1(params)
    if not verdict:
        raise ConfigError(f"parameters are not admissible: {', '.join(verdict.violated)}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.mode == "scalar":
        w, report = solve_scalar(params, grid, config)
        write_field(w, out / "w.chqf")
        _emit_boundary_warning("w", w)
    elif args.mode == "system":
        u, v, report = solve_system(params, grid, config, init_asymmetry=asymmetry)
        write_field(u, out / "u.chqf")
        write_field(v, out / "v.chqf")
        _emit_boundary_warning("u", u)
        _emit_boundary_warning("v", v)
    else:
        u, v, report = solve_picard(params, grid, config, init_asymmetry=asymmetry)
        write_field(u, out / "u.chqf")
        write_field(v, out / "v.chqf")
        _emit_boundary_warning("u", u)
        _emit_boundary_warning("v", v)

    _json_dump(report.to_dict(), out / "solve_report.json")
    _json_dump(report.final.to_dict(), out / "energy_report.json")
    _write_meta(out, sys.argv[1:])
    print(f"converged={report.converged} iterations={report.iterations}")
    return 0 if report.converged else 1


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    params = _build_params(cfg)
    grid = _build_grid(cfg, params)
    config, asymmetry = _build_solve_config(cfg, args.seed)
    verify_cfg = cfg.get("verify", {})
    multistart = int(verify_cfg.get("multistart", 1))
    tau_factor = float(verify_cfg.get("tau_factor", 4.0))
    resolution = int(verify_cfg.get("region_resolution", 64))
    verdict = check_h1(params)
    if not verdict:
        raise ConfigError(f"parameters are not admissible: {', '.join(verdict.violated)}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    report, artifacts = analysis.run_verification(
        params,
        grid,
        config,
        init_asymmetry=asymmetry,
        multistart=multistart,
        tau_factor=tau_factor,
    )

    if "scalar" in artifacts:
        scalar_dir = out / "scalar"
        scalar_dir.mkdir(exist_ok=True)
        w, scalar_rep = artifacts["scalar"]
        write_field(w, scalar_dir / "w.chqf")
        _emit_boundary_warning("w", w)
        _json_dump(scalar_rep.to_dict(), scalar_dir / "solve_report.json")
        _json_dump(scalar_rep.final.to_dict(), scalar_dir / "energy_report.json")
    for mode in ("system", "picard"):
        if mode not in artifacts:
            continue
        mode_dir = out / mode
        mode_dir.mkdir(exist_ok=True)
        u, v, rep = artifacts[mode]
        write_field(u, mode_dir / "u.chqf")
        write_field(v, mode_dir / "v.chqf")
        if mode == "system":
            _emit_boundary_warning("u", u)
            _emit_boundary_warning("v", v)
        _json_dump(rep.to_dict(), mode_dir / "solve_report.json")
        _json_dump(rep.final.to_dict(), mode_dir / "energy_report.json")

    rows = analysis.region_plot_data(params.N, params.alpha, resolution)
    analysis.write_region_csv(rows, out / "region.csv")
    _json_dump(report.to_dict(), out / "verify_report.json")
    _write_meta(out, sys.argv[1:])

    for check in report.checks:
        if check.status == "not-applicable":
            print(f"[skip] {check.name}: {check.note}")
        else:
            marker = "pass" if check.status == "pass" else "FAIL"
            print(f"[{marker}] {check.name}: deviation={check.deviation:.3e} tol={check.tolerance:.3e}")
    print(f"all_passed={report.all_passed}")
    return 0 if report.all_passed else 1


def cmd_region(args) -> int:
    cfg = _load_config(args.config)
    params = _build_params(cfg)
    resolution = int(cfg.get("verify", {}).get("region_resolution", 64))
    rows = analysis.region_plot_data(params.N, params.alpha, resolution)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    analysis.write_region_csv(rows, out)
    print(f"wrote {len(rows)} raster rows to {out}")
    return 0


def _threads_from(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("CHOQUARD_LAB_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"CHOQUARD_LAB_THREADS must be an integer, got {env!r}") from exc
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choquard-lab",
        description="Ground states of coupled Choquard-type systems with verification",
    )
    parser.add_argument("--threads", type=int, default=None, help="internal FFT worker count")
    sub = parser.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("params", help="check exponent hypotheses and report the theta pair")
    p_params.add_argument("config")
    p_params.add_argument("--require", choices=["h1", "h2"], default=None)
    p_params.set_defaults(func=cmd_params)

    p_solve = sub.add_parser("solve", help="run one solver and write fields and reports")
    p_solve.add_argument("config")
    p_solve.add_argument("--mode", choices=["scalar", "system", "picard"], default="system")
    p_solve.add_argument("--out", required=True)
    p_solve.add_argument("--seed", type=int, default=None, help="override config seed")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run the full verification suite")
    p_verify.add_argument("config")
    p_verify.add_argument("--out", required=True)
    p_verify.add_argument("--seed", type=int, default=None, help="override config seed")
    p_verify.set_defaults(func=cmd_verify)

    p_region = sub.add_parser("region", help="emit the admissible-region raster CSV")
    p_region.add_argument("config")
    p_region.add_argument("--out", required=True)
    p_region.set_defaults(func=cmd_region)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        set_fft_workers(_threads_from(args))
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
