"""Quadrature and expansion coefficients of the problem data.

Two coefficient families are computed for each mode: the direct data
coefficients ``(1/pi) * int g(x) * kernel(x) dx`` and the
third-derivative coefficients ``(1/pi) * int g'''(x) * swap_kernel(x) dx``
obtained by integrating the data coefficient by parts three times (the
swap kernel is the opposite trig function at the mode's frequency).
Under the boundary hypotheses of each family the two are related by

    data_coef = d3_sign * d3_coef / kappa^3

which is what lets the inverse solver trade three powers of decay for a
derivative of the data.  The constant mode (Neumann/periodic) uses the
mean value ``(1/(2 pi)) * int g dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .basis import BcKind, Kernel, ModeId, deriv_kernel, kernel, scheme

__all__ = [
    "QuadratureRule", "ModeCoefficients", "CoefficientSet", "HypothesisCheck",
    "fourier_coefficient", "third_derivative_coefficients",
    "compatibility_check",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule mapped to (-pi, pi)."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_legendre(cls, n: int = 512) -> "QuadratureRule":
        if n < 2:
            raise ValueError(f"need at least 2 quadrature nodes, got {n}")
        base_nodes, base_weights = np.polynomial.legendre.leggauss(n)
        nodes = math.pi * base_nodes
        weights = math.pi * base_weights
        rule = cls(n, nodes, weights)
        total = rule.weights.sum()
        if abs(total - _TWO_PI) > 1e-12:
            raise AssertionError(
                f"quadrature weights sum to {total!r}, expected 2*pi")
        return rule

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def _checked_samples(g: ex.Expr, rule: QuadratureRule, label: str) -> np.ndarray:
    values = ex.sample(g, rule.nodes)
    bad = ~np.isfinite(values)
    if bad.any():
        where = rule.nodes[bad][0]
        raise ValueError(
            f"{label} is not finite at quadrature node x={where!r}")
    return values


def fourier_coefficient(g: ex.Expr, kern: Kernel, rule: QuadratureRule) -> float:
    """Projection coefficient of ``g`` against a kernel.

    Normalisation is 1/pi for trig kernels and 1/(2 pi) for the constant
    kernel, matching the kernels' squared norms over (-pi, pi).
    """
    values = _checked_samples(g, rule, "integrand")
    norm = _TWO_PI if kern.trig == "const" else math.pi
    return rule.integrate(values * kern(rule.nodes)) / norm


@dataclass(frozen=True)
class ModeCoefficients:
    data_phi: float
    data_psi: float
    d3_phi: float
    d3_psi: float


@dataclass(frozen=True)
class CoefficientSet:
    kind: BcKind
    n_modes: int
    entries: dict[ModeId, ModeCoefficients]
    phi0: float | None      # mean values; None unless the family has a
    psi0: float | None      # constant mode
    d3_budget_even: float   # (1/pi)*int of the even/odd parts of
    d3_budget_odd: float    # (phi''' - psi''')^2, for tail estimates

    def mode_ids(self) -> list[ModeId]:
        return sorted(self.entries)


def third_derivative_coefficients(
        phi: ex.Expr, psi: ex.Expr, kind: BcKind, n_modes: int,
        rule: QuadratureRule) -> CoefficientSet:
    """Data and third-derivative coefficients for all modes with k <= n_modes."""
    if n_modes < 1:
        raise ValueError(f"need at least one mode, got n_modes={n_modes}")
    sch = scheme(kind)
    phi3 = ex.differentiate(phi, 3)
    psi3 = ex.differentiate(psi, 3)

    xs = rule.nodes
    phi_vals = _checked_samples(phi, rule, "initial profile")
    psi_vals = _checked_samples(psi, rule, "final profile")
    phi3_vals = _checked_samples(phi3, rule, "third derivative of initial profile")
    psi3_vals = _checked_samples(psi3, rule, "third derivative of final profile")

    entries: dict[ModeId, ModeCoefficients] = {}
    for branch_rule in sch.branches:
        for k in range(branch_rule.k_start, n_modes + 1):
            mode = ModeId(branch_rule.branch, k)
            kvals = kernel(kind, mode)(xs)
            dvals = deriv_kernel(kind, mode)(xs)
            entries[mode] = ModeCoefficients(
                data_phi=rule.integrate(phi_vals * kvals) / math.pi,
                data_psi=rule.integrate(psi_vals * kvals) / math.pi,
                d3_phi=rule.integrate(phi3_vals * dvals) / math.pi,
                d3_psi=rule.integrate(psi3_vals * dvals) / math.pi,
            )

    phi0 = psi0 = None
    if sch.has_constant:
        phi0 = rule.integrate(phi_vals) / _TWO_PI
        psi0 = rule.integrate(psi_vals) / _TWO_PI

    # Parity split of g = phi''' - psi''' for the Bessel tail budgets.
    # Gauss-Legendre node sets are symmetric, but evaluate at -x directly
    # so no node-ordering assumption is made.
    g_here = phi3_vals - psi3_vals
    g_mirror = (ex.sample(phi3, -xs) - ex.sample(psi3, -xs))
    g_even = 0.5 * (g_here + g_mirror)
    g_odd = 0.5 * (g_here - g_mirror)
    budget_even = rule.integrate(g_even * g_even) / math.pi
    budget_odd = rule.integrate(g_odd * g_odd) / math.pi

    return CoefficientSet(kind, n_modes, entries, phi0, psi0,
                          budget_even, budget_odd)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    order: int
    residual: float
    tol: float
    passed: bool


def _endpoint_residual(kind: BcKind, g: ex.Expr, order: int) -> float:
    d = ex.differentiate(g, order)
    left = ex.evaluate(d, -math.pi)
    right = ex.evaluate(d, math.pi)
    if kind == BcKind.PERIODIC:
        return abs(right - left)
    if kind == BcKind.ANTIPERIODIC:
        return abs(right + left)
    return max(abs(left), abs(right))


_HYPOTHESIS_ORDERS = {
    BcKind.DIRICHLET: (0, 2),
    BcKind.NEUMANN: (1,),
    BcKind.PERIODIC: (0, 1, 2),
    BcKind.ANTIPERIODIC: (0, 1, 2),
}


def compatibility_check(phi: ex.Expr, psi: ex.Expr, kind: BcKind,
                        tol: float = 1e-9) -> list[HypothesisCheck]:
    """Endpoint hypotheses the series solution needs from the data.

    Dirichlet: orders 0 and 2 vanish at +-pi.  Neumann: order 1 vanishes.
    Periodic: orders 0..2 match at the endpoints.  Antiperiodic: orders
    0..2 match with opposite sign.  Failures are reported, never raised;
    the solver still runs on incompatible data (with degraded accuracy).
    """
    checks: list[HypothesisCheck] = []
    for label, g in (("phi", phi), ("psi", psi)):
        for order in _HYPOTHESIS_ORDERS[kind]:
            residual = _endpoint_residual(kind, g, order)
            checks.append(HypothesisCheck(
                name=f"compatibility:{label}:order{order}",
                order=order,
                residual=residual,
                tol=tol,
                passed=bool(residual <= tol),
            ))
    return checks
