"""Mode tables, eigenvalues, endpoint behavior, and orthogonality."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorheat.basis import (
    BcKind,
    Branch,
    ModeId,
    basis_eval,
    deriv_kernel,
    eigen_residual,
    eigenvalue,
    kernel,
    modes,
    norm_constant,
    parse_kind,
    scheme,
)

ALL_KINDS = list(BcKind)


def test_mode_tables():
    d = modes(BcKind.DIRICHLET, 2)
    assert d == [
        ModeId(Branch.BRANCH1, 0),
        ModeId(Branch.BRANCH1, 1),
        ModeId(Branch.BRANCH1, 2),
        ModeId(Branch.BRANCH2, 1),
        ModeId(Branch.BRANCH2, 2),
    ]
    n = modes(BcKind.NEUMANN, 1)
    assert n[0] == ModeId(Branch.CONSTANT, 0)
    assert ModeId(Branch.BRANCH2, 0) in n
    assert ModeId(Branch.BRANCH1, 0) not in n
    p = modes(BcKind.PERIODIC, 2)
    assert p[0] == ModeId(Branch.CONSTANT, 0)
    assert ModeId(Branch.BRANCH1, 0) not in p and ModeId(Branch.BRANCH2, 0) not in p
    a = modes(BcKind.ANTIPERIODIC, 1)
    assert ModeId(Branch.CONSTANT, 0) not in a
    assert ModeId(Branch.BRANCH1, 0) in a and ModeId(Branch.BRANCH2, 0) in a


def test_kernel_shapes():
    x = np.linspace(-math.pi, math.pi, 7)
    k = kernel(BcKind.DIRICHLET, ModeId(Branch.BRANCH1, 0))
    assert np.allclose(k(x), np.cos(0.5 * x))
    k = kernel(BcKind.DIRICHLET, ModeId(Branch.BRANCH2, 2))
    assert np.allclose(k(x), np.sin(2 * x))
    k = kernel(BcKind.ANTIPERIODIC, ModeId(Branch.BRANCH1, 1))
    assert np.allclose(k(x), np.sin(1.5 * x))
    k = kernel(BcKind.NEUMANN, ModeId(Branch.BRANCH2, 0))
    assert np.allclose(k(x), np.sin(0.5 * x))


def test_eigenvalue_examples():
    """kappa^2 scaled by (1 - eps) on cosine branches, (1 + eps) on sine."""
    assert eigenvalue(BcKind.DIRICHLET, ModeId(Branch.BRANCH1, 0), 0.1) == pytest.approx(0.225)
    assert eigenvalue(BcKind.DIRICHLET, ModeId(Branch.BRANCH1, 1), 0.1) == pytest.approx(2.025)
    assert eigenvalue(BcKind.DIRICHLET, ModeId(Branch.BRANCH2, 1), 0.1) == pytest.approx(1.1)
    assert eigenvalue(BcKind.ANTIPERIODIC, ModeId(Branch.BRANCH1, 0), -0.5) == pytest.approx(0.125)
    assert eigenvalue(BcKind.ANTIPERIODIC, ModeId(Branch.BRANCH2, 0), -0.5) == pytest.approx(0.375)
    assert eigenvalue(BcKind.NEUMANN, ModeId(Branch.CONSTANT, 0), 0.7) == 0.0


def test_eigenvalue_affine_in_eps():
    for kind in ALL_KINDS:
        for m in modes(kind, 4):
            lo = eigenvalue(kind, m, -0.3)
            hi = eigenvalue(kind, m, 0.3)
            mid = eigenvalue(kind, m, 0.0)
            assert lo + hi == pytest.approx(2 * mid, rel=1e-14)
            assert mid >= 0.0


def test_eigenvalues_positive_for_nonconstant_modes():
    for kind in ALL_KINDS:
        for eps in (-0.9, 0.0, 0.9):
            for m in modes(kind, 6):
                lam = eigenvalue(kind, m, eps)
                if m.branch is Branch.CONSTANT:
                    assert lam == 0.0
                else:
                    assert lam > 0.0


def test_inadmissible_modes_raise():
    with pytest.raises(ValueError):
        kernel(BcKind.DIRICHLET, ModeId(Branch.CONSTANT, 0))
    with pytest.raises(ValueError):
        kernel(BcKind.DIRICHLET, ModeId(Branch.BRANCH2, 0))
    with pytest.raises(ValueError):
        eigenvalue(BcKind.PERIODIC, ModeId(Branch.BRANCH1, 0), 0.2)
    with pytest.raises(ValueError):
        basis_eval(BcKind.ANTIPERIODIC, ModeId(Branch.CONSTANT, 0), 0.0)


def test_parse_kind():
    assert parse_kind("dirichlet") is BcKind.DIRICHLET
    assert parse_kind("AntiPeriodic") is BcKind.ANTIPERIODIC
    with pytest.raises(ValueError, match="periodic"):
        parse_kind("robin")


def test_endpoint_behavior():
    """Each family satisfies its defining endpoint conditions exactly."""
    for m in modes(BcKind.DIRICHLET, 5):
        assert basis_eval(BcKind.DIRICHLET, m, -math.pi) == pytest.approx(0.0, abs=1e-12)
        assert basis_eval(BcKind.DIRICHLET, m, math.pi) == pytest.approx(0.0, abs=1e-12)
    for m in modes(BcKind.NEUMANN, 5):
        if m.branch is Branch.CONSTANT:
            continue
        dk = deriv_kernel(BcKind.NEUMANN, m)
        assert dk(-math.pi) * dk.kappa == pytest.approx(0.0, abs=1e-12)
        assert dk(math.pi) * dk.kappa == pytest.approx(0.0, abs=1e-12)
    for m in modes(BcKind.PERIODIC, 5):
        left = basis_eval(BcKind.PERIODIC, m, -math.pi)
        right = basis_eval(BcKind.PERIODIC, m, math.pi)
        assert left == pytest.approx(right, abs=1e-12)
    for m in modes(BcKind.ANTIPERIODIC, 5):
        left = basis_eval(BcKind.ANTIPERIODIC, m, -math.pi)
        right = basis_eval(BcKind.ANTIPERIODIC, m, math.pi)
        assert left == pytest.approx(-right, abs=1e-12)


def test_orthogonality_and_norms(quad_rule):
    """Gram matrix of each family is norm_constant on the diagonal, zero off."""
    x = quad_rule.nodes
    w = quad_rule.weights
    for kind in ALL_KINDS:
        ms = modes(kind, 8)
        vals = np.array([basis_eval(kind, m, x) for m in ms])
        gram = (vals * w) @ vals.T
        for i, m in enumerate(ms):
            assert gram[i, i] == pytest.approx(norm_constant(kind, m), rel=1e-12)
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-10


def test_eigen_residual_small_on_table_modes():
    xs = np.linspace(-math.pi, math.pi, 33)
    for kind in ALL_KINDS:
        for eps in (-0.9, -0.5, 0.0, 0.5, 0.9):
            for m in modes(kind, 10):
                r = eigen_residual(kind, m, eps, xs)
                assert np.max(np.abs(r)) < 1e-11


@given(
    kind=st.sampled_from(ALL_KINDS),
    eps=st.floats(-0.95, 0.95),
    k=st.integers(0, 30),
    x=st.floats(-math.pi, math.pi),
)
@settings(max_examples=200, deadline=None)
def test_property_every_admissible_mode_solves_spectral_problem(kind, eps, k, x):
    s = scheme(kind)
    for rule in s.branches:
        if k < rule.k_start:
            continue
        m = ModeId(rule.branch, k)
        r = eigen_residual(kind, m, eps, np.array([x]))
        assert abs(float(r[0])) < 1e-9


def test_scheme_reports_constant_mode_presence():
    assert not scheme(BcKind.DIRICHLET).has_constant
    assert scheme(BcKind.NEUMANN).has_constant
    assert scheme(BcKind.PERIODIC).has_constant
    assert not scheme(BcKind.ANTIPERIODIC).has_constant
