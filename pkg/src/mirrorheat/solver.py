"""Series reconstruction of the source and the temperature field.

Given initial and final profiles ``phi = u(.,0)`` and ``psi = u(.,T)``
for ``u_t - u_xx + eps*u_xx(-x,t) = f(x)``, each admissible mode evolves
independently: ``w'(t) + lambda*w(t) = f_k`` with ``w(0) = phi_k`` and
``w(T) = psi_k``, so

    C_k   = (phi_k - psi_k) / (1 - e^(-lambda T))
    f_k   = lambda * (phi_k - C_k)
    w(t)  = phi_k + C_k * (e^(-lambda t) - 1)

The default route computes ``phi_k - psi_k`` from third-derivative
coefficients (``d3_sign * (d3phi_k - d3psi_k) / kappa^3``), which decays
three powers faster than the raw projections; the raw route is kept as a
debug path and the two must agree tightly on well-posed data.  Summation
uses the compensated kernels in :mod:`mirrorheat.kernels`, and the fields
are assembled around the data itself::

    u(x,t) = phi(x) + (t/T)(psi_0 - phi_0) + sum C_k (e^(-lambda t)-1) X_k(x)
    f(x)   = -phi''(x) + eps*phi''(-x) + (psi_0 - phi_0)/T - sum lambda C_k X_k(x)

(the mean-value ramp terms only exist for families with a constant mode).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from . import kernels
from .basis import BcKind, ModeId, scheme
from .coefficients import CoefficientSet, QuadratureRule, third_derivative_coefficients

__all__ = [
    "ProblemSpec", "ModalSolution", "ConstantMode", "SeriesSolution",
    "SolverError", "solve", "modal_constants",
    "evaluate_u", "evaluate_f", "evaluate_u_x", "pde_residual",
    "tail_estimate",
]

_DENOM_FLOOR = 1e-300
_DOMAIN_SLACK = 1e-9


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    kind: BcKind
    epsilon: float
    T: float
    phi: ex.Expr
    psi: ex.Expr
    n_modes: int = 64
    quad_nodes: int = 512
    nx: int = 256
    nt: int = 512

    def __post_init__(self):
        if not isinstance(self.kind, BcKind):
            raise SolverError(f"kind must be a BcKind, got {self.kind!r}")
        if not (isinstance(self.epsilon, (int, float))
                and math.isfinite(self.epsilon) and abs(self.epsilon) < 1.0):
            raise SolverError(
                f"coupling strength must satisfy |eps| < 1, got {self.epsilon!r}")
        if not (isinstance(self.T, (int, float))
                and math.isfinite(self.T) and self.T > 0.0):
            raise SolverError(f"final time must be positive, got {self.T!r}")
        if not isinstance(self.phi, ex.Expr) or not isinstance(self.psi, ex.Expr):
            raise SolverError("phi and psi must be parsed expressions")
        if self.n_modes < 1:
            raise SolverError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.quad_nodes < 2:
            raise SolverError(f"quad_nodes must be >= 2, got {self.quad_nodes}")
        if self.nx < 2 or self.nx % 2 != 0:
            raise SolverError(f"nx must be a positive even integer, got {self.nx}")
        if self.nt < 1:
            raise SolverError(f"nt must be >= 1, got {self.nt}")


@dataclass(frozen=True)
class ModalSolution:
    mode: ModeId
    lam: float
    C: float
    f_coef: float


@dataclass(frozen=True)
class ConstantMode:
    phi0: float
    psi0: float
    ramp_rate: float   # (psi0 - phi0) / T; equals the constant source component


@dataclass(eq=False)
class SeriesSolution:
    spec: ProblemSpec
    modes: list[ModalSolution]
    constant: ConstantMode | None
    coefficients: CoefficientSet
    tail: float
    warnings: tuple[str, ...]
    route: str
    # packed per-mode arrays for the summation kernels
    _kappa: np.ndarray = field(repr=False, default=None)
    _lam: np.ndarray = field(repr=False, default=None)
    _C: np.ndarray = field(repr=False, default=None)
    _is_sin: np.ndarray = field(repr=False, default=None)
    _phi1: ex.Expr = field(repr=False, default=None)
    _phi2: ex.Expr = field(repr=False, default=None)

    @property
    def ramp_rate(self) -> float:
        return self.constant.ramp_rate if self.constant is not None else 0.0


def _denominator(lam: float, T: float) -> float:
    denom = -math.expm1(-lam * T)
    if denom < _DENOM_FLOOR:
        raise SolverError(
            f"time-factor denominator 1 - e^(-lambda T) = {denom!r} underflows "
            f"for lambda = {lam!r}, T = {T!r}")
    return denom


def modal_constants(coeffs: CoefficientSet, eps: float, T: float,
                    route: str = "d3") -> dict[ModeId, float]:
    """Per-mode constants C_k from either coefficient route."""
    if route not in ("d3", "raw"):
        raise SolverError(f"route must be 'd3' or 'raw', got {route!r}")
    sch = scheme(coeffs.kind)
    out: dict[ModeId, float] = {}
    for mode, entry in coeffs.entries.items():
        rule = sch.rule_for(mode.branch)
        kap = rule.kappa(mode.k)
        lam = rule.eps_factor(eps) * kap * kap
        denom = _denominator(lam, T)
        if route == "raw":
            out[mode] = (entry.data_phi - entry.data_psi) / denom
        else:
            out[mode] = (rule.d3_sign * (entry.d3_phi - entry.d3_psi)
                         / (kap ** 3 * denom))
    return out


def _tail_bound(coeffs: CoefficientSet, eps: float, T: float) -> float:
    """Sup-norm bound on the discarded u-series tail (modes k > n_modes).

    Per branch: Cauchy-Schwarz on sum |dC_k|/kappa^3 with the Bessel
    residual of the third-derivative coefficients against the parity part
    of phi''' - psi''' that the branch's swap kernels span, the integral
    bound sum_{k>N} kappa^{-6} <= kappa(N)^{-5}/5, and the time-factor
    bound 1/(1 - e^(-lambda_{N+1} T)).
    """
    sch = scheme(coeffs.kind)
    n = coeffs.n_modes
    total = 0.0
    for rule in sch.branches:
        budget = (coeffs.d3_budget_even if rule.swap_trig == "cos"
                  else coeffs.d3_budget_odd)
        partial = 0.0
        for k in range(rule.k_start, n + 1):
            entry = coeffs.entries[ModeId(rule.branch, k)]
            delta = entry.d3_phi - entry.d3_psi
            partial += delta * delta
        residual = max(0.0, budget - partial)
        kap_next = rule.kappa(n + 1)
        lam_next = rule.eps_factor(eps) * kap_next * kap_next
        time_bound = 1.0 / _denominator(lam_next, T)
        kappa_tail = rule.kappa(n) ** -5 / 5.0
        total += time_bound * math.sqrt(residual) * math.sqrt(kappa_tail)
    return total


def solve(spec: ProblemSpec, route: str = "d3") -> SeriesSolution:
    """Reconstruct the modal solution from the data in ``spec``."""
    if route not in ("d3", "raw"):
        raise SolverError(f"route must be 'd3' or 'raw', got {route!r}")
    rule = QuadratureRule.gauss_legendre(spec.quad_nodes)
    coeffs = third_derivative_coefficients(
        spec.phi, spec.psi, spec.kind, spec.n_modes, rule)
    constants = modal_constants(coeffs, spec.epsilon, spec.T, route)

    sch = scheme(spec.kind)
    modal: list[ModalSolution] = []
    kappa_arr: list[float] = []
    lam_arr: list[float] = []
    c_arr: list[float] = []
    sin_arr: list[bool] = []
    for branch_rule in sch.branches:
        for k in range(branch_rule.k_start, spec.n_modes + 1):
            mode = ModeId(branch_rule.branch, k)
            kap = branch_rule.kappa(k)
            lam = branch_rule.eps_factor(spec.epsilon) * kap * kap
            c = constants[mode]
            f_coef = lam * (coeffs.entries[mode].data_phi - c)
            modal.append(ModalSolution(mode, lam, c, f_coef))
            kappa_arr.append(kap)
            lam_arr.append(lam)
            c_arr.append(c)
            sin_arr.append(branch_rule.trig == "sin")

    constant = None
    if sch.has_constant:
        constant = ConstantMode(
            phi0=coeffs.phi0, psi0=coeffs.psi0,
            ramp_rate=(coeffs.psi0 - coeffs.phi0) / spec.T)

    warnings: list[str] = []
    if spec.epsilon == 0.0:
        warnings.append(
            "eps = 0: mirrored diffusion term is inactive, problem reduces "
            "to the classical heat equation (accepted for cross-checks)")

    tail = _tail_bound(coeffs, spec.epsilon, spec.T)

    return SeriesSolution(
        spec=spec, modes=modal, constant=constant, coefficients=coeffs,
        tail=tail, warnings=tuple(warnings), route=route,
        _kappa=np.asarray(kappa_arr, dtype=float),
        _lam=np.asarray(lam_arr, dtype=float),
        _C=np.asarray(c_arr, dtype=float),
        _is_sin=np.asarray(sin_arr, dtype=bool),
        _phi1=ex.differentiate(spec.phi, 1),
        _phi2=ex.differentiate(spec.phi, 2),
    )


def tail_estimate(sol: SeriesSolution) -> float:
    """Upper bound on the sup norm of the truncated u-series tail."""
    return sol.tail


# ---------------------------------------------------------------------------
# field evaluation

def _check_domain(sol: SeriesSolution, xs: np.ndarray, ts: np.ndarray | None):
    xmax = math.pi * (1.0 + _DOMAIN_SLACK) + _DOMAIN_SLACK
    if xs.size and (np.min(xs) < -xmax or np.max(xs) > xmax):
        bad = xs[(xs < -xmax) | (xs > xmax)][0]
        raise SolverError(f"evaluation point x={bad!r} is outside [-pi, pi]")
    if ts is not None and ts.size:
        tmax = sol.spec.T * (1.0 + _DOMAIN_SLACK) + _DOMAIN_SLACK
        if np.min(ts) < -_DOMAIN_SLACK * (1.0 + sol.spec.T) or np.max(ts) > tmax:
            bad = ts[(ts < -_DOMAIN_SLACK * (1.0 + sol.spec.T)) | (ts > tmax)][0]
            raise SolverError(f"evaluation time t={bad!r} is outside [0, T]")


def _broadcast(x, t):
    xs = np.asarray(x, dtype=float)
    ts = np.asarray(t, dtype=float)
    scalar = xs.ndim == 0 and ts.ndim == 0
    xb, tb = np.broadcast_arrays(xs, ts)
    return xb.ravel(), tb.ravel(), xb.shape, scalar


def _shape(flat: np.ndarray, shape, scalar: bool):
    if scalar:
        return float(flat[0])
    return flat.reshape(shape)


def evaluate_u(sol: SeriesSolution, x, t):
    """Temperature field u(x, t); accepts scalars or broadcastable arrays."""
    fx, ft, shape, scalar = _broadcast(x, t)
    _check_domain(sol, fx, ft)
    out = ex.sample(sol.spec.phi, fx)
    if sol.constant is not None:
        out = out + ft * sol.ramp_rate
    out = out + kernels.u_series(fx, ft, sol._kappa, sol._lam, sol._C, sol._is_sin)
    return _shape(out, shape, scalar)


def evaluate_f(sol: SeriesSolution, x):
    """Reconstructed source term f(x); accepts scalars or arrays."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    fx = np.atleast_1d(xs).ravel()
    _check_domain(sol, fx, None)
    out = (-ex.sample(sol._phi2, fx)
           + sol.spec.epsilon * ex.sample(sol._phi2, -fx))
    if sol.constant is not None:
        out = out + sol.ramp_rate
    out = out + kernels.f_series(fx, sol._kappa, sol._lam, sol._C, sol._is_sin)
    return _shape(out, np.atleast_1d(xs).shape, scalar)


def evaluate_u_x(sol: SeriesSolution, x, t):
    """Spatial derivative u_x(x, t) by termwise differentiation."""
    fx, ft, shape, scalar = _broadcast(x, t)
    _check_domain(sol, fx, ft)
    # trig' swaps the kernel: cos -> -kappa*sin, sin -> +kappa*cos
    mult = np.where(sol._is_sin, sol._kappa, -sol._kappa)
    out = ex.sample(sol._phi1, fx)
    out = out + kernels.u_series(fx, ft, sol._kappa, sol._lam,
                                 sol._C * mult, ~sol._is_sin)
    return _shape(out, shape, scalar)


def pde_residual(sol: SeriesSolution, x, t):
    """u_t - u_xx + eps*u_xx(-x, t) - f(x) from termwise-differentiated series."""
    fx, ft, shape, scalar = _broadcast(x, t)
    _check_domain(sol, fx, ft)
    eps = sol.spec.epsilon
    args = (sol._kappa, sol._lam, sol._C, sol._is_sin)

    u_t = sol.ramp_rate + kernels.ut_series(fx, ft, *args)
    u_xx = ex.sample(sol._phi2, fx) + kernels.uxx_series(fx, ft, *args)
    u_xx_m = (ex.sample(sol._phi2, -fx)
              + kernels.uxx_series(fx, ft, *args, mirror=True))
    f_val = (-ex.sample(sol._phi2, fx)
             + eps * ex.sample(sol._phi2, -fx)
             + sol.ramp_rate
             + kernels.f_series(fx, sol._kappa, sol._lam, sol._C, sol._is_sin))
    out = u_t - u_xx + eps * u_xx_m - f_val
    return _shape(out, shape, scalar)
