"""Quadrature, coefficient projection, and data-hypothesis checks."""

import math

import numpy as np
import pytest

from mirrorheat.basis import BcKind, Branch, ModeId, kernel
from mirrorheat.coefficients import (
    QuadratureRule,
    compatibility_check,
    fourier_coefficient,
    third_derivative_coefficients,
)
from mirrorheat.expr import parse, sample


def test_quadrature_weights_sum_to_interval_length(quad_rule):
    assert abs(np.sum(quad_rule.weights) - 2 * math.pi) < 1e-12
    assert np.all(np.abs(quad_rule.nodes) < math.pi)


def test_quadrature_integrates_polynomials_exactly(quad_rule):
    # Gauss-Legendre with 512 nodes is exact through degree 1023.
    vals = quad_rule.nodes**6
    exact = 2 * math.pi**7 / 7
    assert quad_rule.integrate(vals) == pytest.approx(exact, rel=1e-12)


def test_fourier_coefficient_of_matching_mode(quad_rule):
    kern = kernel(BcKind.DIRICHLET, ModeId(Branch.BRANCH2, 1))
    assert fourier_coefficient(parse("sin(x)"), kern, quad_rule) == pytest.approx(1.0, abs=1e-13)
    assert fourier_coefficient(parse("sin(2*x)"), kern, quad_rule) == pytest.approx(0.0, abs=1e-13)
    kern0 = kernel(BcKind.DIRICHLET, ModeId(Branch.BRANCH1, 0))
    assert fourier_coefficient(parse("3*cos(0.5*x)"), kern0, quad_rule) == pytest.approx(
        3.0, abs=1e-13
    )


def test_constant_mode_coefficient_is_mean(quad_rule):
    kern = kernel(BcKind.NEUMANN, ModeId(Branch.CONSTANT, 0))
    assert fourier_coefficient(parse("2.5"), kern, quad_rule) == pytest.approx(2.5, abs=1e-13)
    assert fourier_coefficient(parse("sin(x)"), kern, quad_rule) == pytest.approx(0.0, abs=1e-13)


def test_third_derivative_projection_example(quad_rule):
    """psi = sin(x): the order-three derivative is -cos(x), and its
    projection on the swapped kernel of the sin(kx) branch at k=1 is -1."""
    cs = third_derivative_coefficients(parse("0"), parse("sin(x)"), BcKind.DIRICHLET, 8, quad_rule)
    entry = cs.entries[ModeId(Branch.BRANCH2, 1)]
    assert entry.d3_psi == pytest.approx(-1.0, abs=1e-12)
    assert entry.data_psi == pytest.approx(1.0, abs=1e-12)
    assert entry.d3_phi == 0.0
    for m, e in cs.entries.items():
        if m != ModeId(Branch.BRANCH2, 1):
            assert abs(e.d3_psi) < 1e-12


def test_budgets_split_by_parity(quad_rule):
    """For phi - psi = sin(x), the difference of third derivatives is
    -cos(x): all budget mass sits in the even part."""
    cs = third_derivative_coefficients(parse("sin(x)"), parse("0"), BcKind.DIRICHLET, 8, quad_rule)
    assert cs.d3_budget_even == pytest.approx(1.0, rel=1e-12)
    assert cs.d3_budget_odd == pytest.approx(0.0, abs=1e-12)


def test_bessel_inequality(quad_rule):
    phi = parse("sin(x)*exp(cos(x))")
    psi = parse("0.3*sin(x)")
    cs = third_derivative_coefficients(phi, psi, BcKind.DIRICHLET, 32, quad_rule)
    even_sum = 0.0
    odd_sum = 0.0
    for m in cs.mode_ids():
        if m.branch is Branch.CONSTANT:
            continue
        e = cs.entries[m]
        diff2 = (e.d3_phi - e.d3_psi) ** 2
        # branch 1 kernels are cosines for this family, their swapped
        # integration kernels are sines, so they draw on the odd budget
        if m.branch is Branch.BRANCH1:
            odd_sum += diff2
        else:
            even_sum += diff2
    # the 1e-24 term absorbs squared roundoff in analytically-zero sums
    assert even_sum <= cs.d3_budget_even * (1 + 1e-12) + 1e-24
    assert odd_sum <= cs.d3_budget_odd * (1 + 1e-12) + 1e-24


def test_node_doubling_leaves_coefficients_stable():
    phi = parse("sin(x)*exp(cos(x))")
    psi = parse("0.3*sin(x)")
    r1 = QuadratureRule.gauss_legendre(512)
    r2 = QuadratureRule.gauss_legendre(1024)
    c1 = third_derivative_coefficients(phi, psi, BcKind.DIRICHLET, 64, r1)
    c2 = third_derivative_coefficients(phi, psi, BcKind.DIRICHLET, 64, r2)
    for m in c1.mode_ids():
        e1, e2 = c1.entries[m], c2.entries[m]
        assert abs(e1.data_phi - e2.data_phi) < 1e-10
        assert abs(e1.data_psi - e2.data_psi) < 1e-10
        assert abs(e1.d3_phi - e2.d3_phi) < 1e-10
        assert abs(e1.d3_psi - e2.d3_psi) < 1e-10


def test_reconstruction_error_decays_with_mode_count(quad_rule):
    phi = parse("exp(cos(x))")
    x = np.linspace(-math.pi, math.pi, 201)
    target = sample(phi, x)
    errs = []
    for n in (4, 8, 16):
        cs = third_derivative_coefficients(phi, parse("0"), BcKind.NEUMANN, n, quad_rule)
        recon = np.full_like(x, cs.phi0)
        for m in cs.mode_ids():
            if m.branch is Branch.CONSTANT:
                continue
            recon += cs.entries[m].data_phi * kernel(BcKind.NEUMANN, m)(x)
        errs.append(np.max(np.abs(recon - target)))
    assert errs[1] < errs[0] / 10
    assert errs[2] < errs[1] / 10


def test_compatibility_orders_per_family():
    names = lambda checks: sorted({c.order for c in checks})
    assert names(compatibility_check(parse("0"), parse("sin(x)"), BcKind.DIRICHLET)) == [0, 2]
    assert names(compatibility_check(parse("cos(x)"), parse("0"), BcKind.NEUMANN)) == [1]
    assert names(compatibility_check(parse("sin(x)"), parse("0"), BcKind.PERIODIC)) == [0, 1, 2]
    assert names(compatibility_check(parse("sin(0.5*x)"), parse("0"), BcKind.ANTIPERIODIC)) == [
        0,
        1,
        2,
    ]


def test_compatibility_pass_and_fail_examples():
    ok = compatibility_check(parse("0"), parse("sin(x)"), BcKind.DIRICHLET)
    assert all(c.passed for c in ok)
    bad = compatibility_check(parse("cos(x)"), parse("0"), BcKind.DIRICHLET)
    failing = [c for c in bad if not c.passed]
    assert {c.name for c in failing} == {"compatibility:phi:order0", "compatibility:phi:order2"}
    assert failing[0].residual == pytest.approx(1.0, abs=1e-12)
    slope = compatibility_check(parse("x^2"), parse("0"), BcKind.PERIODIC)
    failed = [c for c in slope if not c.passed]
    assert [c.name for c in failed] == ["compatibility:phi:order1"]
    assert failed[0].residual == pytest.approx(4 * math.pi, rel=1e-12)


def test_nonfinite_data_is_rejected(quad_rule):
    with pytest.raises(ValueError, match="initial profile"):
        third_derivative_coefficients(
            parse("exp(1000*x)"), parse("0"), BcKind.DIRICHLET, 4, quad_rule
        )
