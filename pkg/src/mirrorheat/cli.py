"""Command line interface.

Subcommands::

    mirrorheat solve    --config problem.conf [--out DIR] [overrides]
    mirrorheat verify   --config problem.conf [--out DIR] [overrides]
    mirrorheat spectrum --bc KIND --epsilon E [--kmax K] [--out DIR]
    mirrorheat check    --config problem.conf [--tol TOL]

Configs are flat ``key = value`` text files with ``#`` comments.  Keys:
bc, epsilon, T, phi, psi, N, quad_nodes, nx, nt, output_dir, t_slices.

Exit codes: 0 all checks pass, 1 any warning or failure, 2 usage or
config errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import expr as ex
from .basis import eigenvalue, kernel, modes, parse_kind
from .coefficients import compatibility_check
from .oracle import Grid
from .solver import ProblemSpec, SeriesSolution, SolverError, evaluate_f, evaluate_u, solve
from .verify import CheckResult, VerifyOptions, build_report, run_suite

__all__ = ["main", "ConfigError", "RunConfig", "parse_config"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    bc: str = ""
    epsilon: float | None = None
    T: float | None = None
    phi: str = ""
    psi: str = ""
    n_modes: int = 64
    quad_nodes: int = 512
    nx: int = 256
    nt: int = 512
    output_dir: str = "out"
    t_slices: tuple[float, ...] = ()


_REQUIRED_KEYS = ("bc", "epsilon", "T", "phi", "psi")


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = RunConfig()
    seen: set[str] = set()
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key == "bc":
                cfg.bc = value
            elif key == "epsilon":
                cfg.epsilon = float(value)
            elif key == "T":
                cfg.T = float(value)
            elif key == "phi":
                cfg.phi = value
            elif key == "psi":
                cfg.psi = value
            elif key == "N":
                cfg.n_modes = int(value)
            elif key == "quad_nodes":
                cfg.quad_nodes = int(value)
            elif key == "nx":
                cfg.nx = int(value)
            elif key == "nt":
                cfg.nt = int(value)
            elif key == "output_dir":
                cfg.output_dir = value
            elif key == "t_slices":
                cfg.t_slices = tuple(float(v) for v in value.split(",") if v.strip())
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {err}") from None
    missing = [k for k in _REQUIRED_KEYS
               if getattr(cfg, k) is None or getattr(cfg, k) == ""]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    return cfg


def _build_spec(cfg: RunConfig, args) -> ProblemSpec:
    kind = parse_kind(cfg.bc)
    phi = ex.parse(cfg.phi)
    psi = ex.parse(cfg.psi)
    return ProblemSpec(
        kind=kind, epsilon=cfg.epsilon, T=cfg.T, phi=phi, psi=psi,
        n_modes=args.n if getattr(args, "n", None) else cfg.n_modes,
        quad_nodes=args.quad if getattr(args, "quad", None) else cfg.quad_nodes,
        nx=args.nx if getattr(args, "nx", None) else cfg.nx,
        nt=args.nt if getattr(args, "nt", None) else cfg.nt,
    )


def _out_dir(cfg: RunConfig, args) -> Path:
    out = Path(args.out) if getattr(args, "out", None) else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _slice_name(t: float) -> str:
    return f"u_slice_t{format(t, 'g')}.csv"


def _print_checks(checks) -> None:
    for c in checks:
        print(f"[check] {c.name}: value={c.value:.6e} tol={c.tol:.1e} "
              f"{c.status.upper()}")


def _cmd_solve(args) -> int:
    cfg = parse_config(args.config)
    spec = _build_spec(cfg, args)
    out = _out_dir(cfg, args)
    sol = solve(spec)

    grid = Grid(spec.nx, spec.nt, spec.T)
    x = grid.nodes()

    f_vals = evaluate_f(sol, x)
    _write_csv(out / "f.csv", ["x", "f"], zip(x.tolist(), f_vals.tolist()))

    t_levels = np.linspace(0.0, spec.T, spec.nt + 1)
    rows = []
    for t in t_levels:
        u_vals = evaluate_u(sol, x, t)
        rows.extend(zip(x.tolist(), [float(t)] * x.size, u_vals.tolist()))
    _write_csv(out / "u_grid.csv", ["x", "t", "u"], rows)

    for t in cfg.t_slices:
        if not 0.0 <= t <= spec.T:
            raise ConfigError(f"t_slices entry {t!r} outside [0, T]")
        u_vals = evaluate_u(sol, x, t)
        _write_csv(out / _slice_name(t), ["x", "u"],
                   zip(x.tolist(), u_vals.tolist()))

    _write_coefficients(out / "coefficients.json", sol)

    tol = args.tol if args.tol else 1e-9
    checks = []
    for hc in compatibility_check(spec.phi, spec.psi, spec.kind, tol):
        checks.append(CheckResult(
            name=hc.name, status="pass" if hc.passed else "warn",
            value=hc.residual, tol=hc.tol))
    for note in sol.warnings:
        checks.append(CheckResult("solve:warning", "warn", 0.0, 0.0,
                                  details=note))
    report = build_report(spec, checks)
    report.write(out / "report.json")

    _print_checks(checks)
    print(f"[solve] tail_estimate={sol.tail:.6e}")
    for name in ["f.csv", "u_grid.csv", "coefficients.json", "report.json"]:
        print(f"[solve] wrote {out / name}")
    for t in cfg.t_slices:
        print(f"[solve] wrote {out / _slice_name(t)}")
    return 0 if all(c.status == "pass" for c in checks) else 1


def _write_coefficients(path: Path, sol: SeriesSolution) -> None:
    spec = sol.spec
    entries = []
    for modal in sorted(sol.modes, key=lambda m: (int(m.mode.branch), m.mode.k)):
        entry = sol.coefficients.entries[modal.mode]
        entries.append({
            "branch": int(modal.mode.branch),
            "k": modal.mode.k,
            "lambda": modal.lam,
            "C": modal.C,
            "f": modal.f_coef,
            "data_phi": entry.data_phi,
            "data_psi": entry.data_psi,
            "d3_phi": entry.d3_phi,
            "d3_psi": entry.d3_psi,
        })
    payload = {
        "bc": spec.kind.value,
        "epsilon": spec.epsilon,
        "T": spec.T,
        "n_modes": spec.n_modes,
        "constant": None if sol.constant is None else {
            "phi0": sol.constant.phi0,
            "psi0": sol.constant.psi0,
            "f0": sol.constant.ramp_rate,
        },
        "tail_estimate": sol.tail,
        "modes": entries,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _cmd_verify(args) -> int:
    cfg = parse_config(args.config)
    spec = _build_spec(cfg, args)
    out = _out_dir(cfg, args)
    options = VerifyOptions()
    if args.tol:
        options = VerifyOptions(tol_compatibility=args.tol)
    report = run_suite(spec, options)
    report.write(out / "report.json")
    _write_csv(out / "convergence.csv",
               ["nx", "nt", "h", "tau", "error", "order"],
               [[r["nx"], r["nt"], repr(r["h"]), repr(r["tau"]),
                 repr(r["error"]),
                 "" if r["order"] is None else repr(r["order"])]
                for r in report.convergence])
    _print_checks(report.checks)
    print(f"[verify] wrote {out / 'report.json'}")
    print(f"[verify] wrote {out / 'convergence.csv'}")
    worst = report.worst_status()
    print(f"[verify] worst status: {worst.upper()}")
    return 0 if worst == "pass" else 1


def _cmd_spectrum(args) -> int:
    if args.config:
        cfg = parse_config(args.config)
        bc = args.bc or cfg.bc
        eps = args.epsilon if args.epsilon is not None else cfg.epsilon
    else:
        if not args.bc or args.epsilon is None:
            raise ConfigError("spectrum needs --bc and --epsilon (or --config)")
        bc = args.bc
        eps = args.epsilon
    kind = parse_kind(bc)
    if not abs(eps) < 1.0:
        raise ConfigError(f"|epsilon| < 1 required, got {eps!r}")
    rows = []
    for mode in modes(kind, args.kmax):
        lam = eigenvalue(kind, mode, eps)
        rows.append([int(mode.branch), mode.k, repr(lam),
                     kernel(kind, mode).name])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "spectrum.csv", ["branch", "k", "lambda", "kernel"], rows)
        print(f"[spectrum] wrote {out / 'spectrum.csv'}")
    else:
        print("branch,k,lambda,kernel")
        for row in rows:
            print(",".join(str(v) for v in row))
    return 0


def _cmd_check(args) -> int:
    cfg = parse_config(args.config)
    kind = parse_kind(cfg.bc)
    phi = ex.parse(cfg.phi)
    psi = ex.parse(cfg.psi)
    tol = args.tol if args.tol else 1e-9
    results = compatibility_check(phi, psi, kind, tol)
    for hc in results:
        status = "PASS" if hc.passed else "WARN"
        print(f"[check] {hc.name}: residual={hc.residual:.6e} "
              f"tol={hc.tol:.1e} {status}")
    return 0 if all(hc.passed for hc in results) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrorheat",
        description="Recover the source of a mirrored-diffusion heat "
                    "equation from initial and final profiles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_config=True):
        p.add_argument("--config", required=need_config,
                       help="flat key=value problem description")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--n", type=int, help="series truncation override")
        p.add_argument("--nx", type=int, help="space grid override")
        p.add_argument("--nt", type=int, help="time grid override")
        p.add_argument("--quad", type=int, help="quadrature node override")
        p.add_argument("--tol", type=float,
                       help="compatibility check tolerance override")

    p_solve = sub.add_parser("solve", help="reconstruct f and u, write artifacts")
    add_common(p_solve)
    p_verify = sub.add_parser("verify", help="run the full verification suite")
    add_common(p_verify)
    p_check = sub.add_parser("check", help="check data hypotheses only")
    add_common(p_check)

    p_spec = sub.add_parser("spectrum", help="tabulate eigenvalues")
    p_spec.add_argument("--config", help="read bc/epsilon from a config")
    p_spec.add_argument("--bc", help="boundary condition kind")
    p_spec.add_argument("--epsilon", type=float, help="coupling strength")
    p_spec.add_argument("--kmax", type=int, default=10,
                        help="largest branch index (default 10)")
    p_spec.add_argument("--out", help="write spectrum.csv to this directory")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    handlers = {
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "spectrum": _cmd_spectrum,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ex.ParseError, SolverError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
