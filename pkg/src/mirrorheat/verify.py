"""End-to-end verification suite.

Runs the whole chain on one problem: data hypotheses, basis
orthogonality and eigen-residuals, the solve itself, interpolation of
the data at t=0 and t=T, boundary conditions along the time axis, the
PDE residual on a collocation grid, truncation-tail consistency, and the
forward round trip.  Produces a deterministic report (no timestamps;
repeat runs on identical input are byte-identical) with the JSON shape

    {"checks": [{"name", "status", "value", "tol"}, ...],
     "spec": {...}, "provenance": {...}}
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from . import expr as ex
from . import kernels
from .basis import eigen_residual, kernel, modes
from .coefficients import QuadratureRule, compatibility_check
from .oracle import convergence_study
from .solver import (ProblemSpec, SeriesSolution, evaluate_u,
                     evaluate_u_x, pde_residual, solve)

__all__ = ["CheckResult", "VerifyOptions", "VerificationReport",
           "run_suite", "build_report"]

_PROVENANCE_NOTES = (
    "third-derivative coefficient integrands are used for every boundary family",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str          # "pass" | "warn" | "fail"
    value: float
    tol: float
    details: str = ""


@dataclass(frozen=True)
class VerifyOptions:
    tol_compatibility: float = 1e-9
    tol_orthogonality: float = 1e-10
    tol_eigen: float = 1e-11
    tol_interpolation: float = 1e-7
    tol_bc: float = 1e-8
    tol_pde: float = 1e-6
    tol_roundtrip: float = 5e-4
    tail_slack: float = 1e-12
    min_order: float = 1.9
    kmax: int = 12
    n_collocation: int = 17
    n_report_points: int = 257
    n_bc_times: int = 33
    eigen_points: int = 50
    run_roundtrip: bool = True


@dataclass
class VerificationReport:
    checks: list[CheckResult]
    spec: dict
    provenance: dict
    convergence: list[dict] = field(default_factory=list)

    def worst_status(self) -> str:
        rank = {"pass": 0, "warn": 1, "fail": 2}
        worst = "pass"
        for c in self.checks:
            if rank[c.status] > rank[worst]:
                worst = c.status
        return worst

    def to_json(self) -> str:
        payload = {
            "checks": [dataclasses.asdict(c) for c in self.checks],
            "spec": self.spec,
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=2)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _spec_dict(spec: ProblemSpec) -> dict:
    return {
        "bc": spec.kind.value,
        "epsilon": spec.epsilon,
        "T": spec.T,
        "phi": ex.to_source(spec.phi),
        "psi": ex.to_source(spec.psi),
        "n_modes": spec.n_modes,
        "quad_nodes": spec.quad_nodes,
        "nx": spec.nx,
        "nt": spec.nt,
    }


def _provenance() -> dict:
    return {
        "tool": "mirrorheat",
        "version": __version__,
        "series_backend": kernels.backend(),
        "coefficient_route": "d3",
        "notes": list(_PROVENANCE_NOTES),
    }


def build_report(spec: ProblemSpec, checks: list[CheckResult]) -> VerificationReport:
    return VerificationReport(checks=checks, spec=_spec_dict(spec),
                              provenance=_provenance())


def _status(value: float, tol: float) -> str:
    return "pass" if value <= tol else "fail"


def _compatibility_checks(spec: ProblemSpec, tol: float) -> list[CheckResult]:
    out = []
    for hc in compatibility_check(spec.phi, spec.psi, spec.kind, tol):
        out.append(CheckResult(
            name=hc.name,
            status="pass" if hc.passed else "warn",
            value=hc.residual,
            tol=hc.tol,
            details="" if hc.passed else
            "data hypothesis violated; series accuracy degrades"))
    return out


def _orthogonality_check(spec: ProblemSpec, options: VerifyOptions) -> CheckResult:
    rule = QuadratureRule.gauss_legendre(spec.quad_nodes)
    mode_list = modes(spec.kind, options.kmax)
    values = np.stack([kernel(spec.kind, m)(rule.nodes) for m in mode_list])
    gram = (values * rule.weights) @ values.T
    off = gram - np.diag(np.diag(gram))
    worst = float(np.max(np.abs(off))) if len(mode_list) > 1 else 0.0
    return CheckResult("orthogonality:max_cross_integral",
                       _status(worst, options.tol_orthogonality),
                       worst, options.tol_orthogonality)


def _eigen_check(spec: ProblemSpec, options: VerifyOptions) -> CheckResult:
    rng = np.random.default_rng(20260816)
    xs = rng.uniform(-math.pi, math.pi, options.eigen_points)
    worst = 0.0
    for mode in modes(spec.kind, options.kmax):
        res = eigen_residual(spec.kind, mode, spec.epsilon, xs)
        worst = max(worst, float(np.max(np.abs(res))))
    return CheckResult("eigen_residual:max",
                       _status(worst, options.tol_eigen),
                       worst, options.tol_eigen)


def _interpolation_checks(sol: SeriesSolution,
                          options: VerifyOptions) -> list[CheckResult]:
    spec = sol.spec
    x = np.linspace(-math.pi, math.pi, options.n_report_points)
    err0 = float(np.max(np.abs(evaluate_u(sol, x, 0.0) - ex.sample(spec.phi, x))))
    errT = float(np.max(np.abs(evaluate_u(sol, x, spec.T) - ex.sample(spec.psi, x))))
    tol = options.tol_interpolation
    return [
        CheckResult("interpolation:initial", _status(err0, tol), err0, tol),
        CheckResult("interpolation:final", _status(errT, tol), errT, tol),
    ]


def _bc_check(sol: SeriesSolution, options: VerifyOptions) -> CheckResult:
    spec = sol.spec
    ts = np.linspace(0.0, spec.T, options.n_bc_times)
    left = evaluate_u(sol, -math.pi, ts)
    right = evaluate_u(sol, math.pi, ts)
    kind = spec.kind.value
    if spec.kind.value == "dirichlet":
        worst = float(np.max(np.abs(np.concatenate([left, right]))))
        name = "bc:endpoint_values"
    elif kind == "neumann":
        dleft = evaluate_u_x(sol, -math.pi, ts)
        dright = evaluate_u_x(sol, math.pi, ts)
        worst = float(np.max(np.abs(np.concatenate([dleft, dright]))))
        name = "bc:endpoint_slopes"
    elif kind == "periodic":
        worst = float(np.max(np.abs(right - left)))
        name = "bc:endpoint_match"
    else:
        worst = float(np.max(np.abs(right + left)))
        name = "bc:endpoint_antimatch"
    return CheckResult(name, _status(worst, options.tol_bc), worst, options.tol_bc)


def _collocation_grid(spec: ProblemSpec, n: int):
    x = np.linspace(-math.pi, math.pi, n + 2)[1:-1]
    t = np.linspace(0.0, spec.T, n + 2)[1:-1]
    xg, tg = np.meshgrid(x, t)
    return xg.ravel(), tg.ravel()


def _pde_check(sol: SeriesSolution, options: VerifyOptions) -> CheckResult:
    xg, tg = _collocation_grid(sol.spec, options.n_collocation)
    res = pde_residual(sol, xg, tg)
    worst = float(np.max(np.abs(res)))
    return CheckResult("pde:collocation_residual",
                       _status(worst, options.tol_pde), worst, options.tol_pde)


def _tail_checks(sol: SeriesSolution, options: VerifyOptions) -> list[CheckResult]:
    spec = sol.spec
    doubled = solve(replace(spec, n_modes=2 * spec.n_modes), route=sol.route)
    xg, tg = _collocation_grid(spec, options.n_collocation)
    diff = float(np.max(np.abs(evaluate_u(sol, xg, tg)
                               - evaluate_u(doubled, xg, tg))))
    bound = sol.tail + options.tail_slack
    agree = CheckResult(
        "tail:truncation_agreement",
        _status(diff, bound), diff, bound,
        details=f"tail estimate {sol.tail!r} plus roundoff slack")
    mono_ok = doubled.tail <= sol.tail * (1.0 + 1e-12) + 1e-300
    mono = CheckResult(
        "tail:monotone",
        "pass" if mono_ok else "fail",
        doubled.tail, sol.tail,
        details="estimate at 2N must not exceed estimate at N")
    return [agree, mono]


def _roundtrip_checks(sol: SeriesSolution,
                      options: VerifyOptions) -> tuple[list[CheckResult], list[dict]]:
    spec = sol.spec
    levels = ((max(4, spec.nx // 2), max(1, spec.nt // 2)), (spec.nx, spec.nt))
    rows = convergence_study(sol, levels)
    err = rows[-1]["error"]
    checks = [CheckResult("roundtrip:terminal_error",
                          _status(err, options.tol_roundtrip),
                          err, options.tol_roundtrip)]
    order = rows[-1]["order"]
    floor = 1e-12
    if rows[-1]["error"] <= floor or rows[0]["error"] <= floor:
        checks.append(CheckResult(
            "roundtrip:order", "pass", 99.0, options.min_order,
            details="errors at roundoff floor; order not measurable"))
    else:
        checks.append(CheckResult(
            "roundtrip:order",
            "pass" if order >= options.min_order else "fail",
            float(order), options.min_order,
            details="observed order under (h, tau) halving"))
    return checks, rows


def run_suite(spec: ProblemSpec,
              options: VerifyOptions | None = None) -> VerificationReport:
    """Run every check on one problem and assemble the report."""
    options = options or VerifyOptions()
    checks: list[CheckResult] = []

    checks.extend(_compatibility_checks(spec, options.tol_compatibility))
    checks.append(_orthogonality_check(spec, options))
    checks.append(_eigen_check(spec, options))

    convergence: list[dict] = []
    try:
        sol = solve(spec)
    except Exception as err:  # noqa: BLE001 - reported, not raised
        checks.append(CheckResult("solve", "fail", math.nan, 0.0,
                                  details=str(err)))
    else:
        checks.append(CheckResult("solve", "pass", 0.0, 0.0,
                                  details=f"route=d3 modes={len(sol.modes)}"))
        for note in sol.warnings:
            checks.append(CheckResult("solve:warning", "warn", 0.0, 0.0,
                                      details=note))
        checks.extend(_interpolation_checks(sol, options))
        checks.append(_bc_check(sol, options))
        checks.append(_pde_check(sol, options))
        checks.extend(_tail_checks(sol, options))
        if options.run_roundtrip:
            rt_checks, convergence = _roundtrip_checks(sol, options)
            checks.extend(rt_checks)

    report = build_report(spec, checks)
    report.convergence = convergence
    return report
