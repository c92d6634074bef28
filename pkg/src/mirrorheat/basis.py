"""Mode tables for the mirrored-diffusion eigenvalue problem.

Separating variables in ``u_t - u_xx + eps*u_xx(-x, t) = f(x)`` on
``(-pi, pi)`` leads to the boundary value problem

    X''(x) - eps*X''(-x) + lambda*X(x) = 0

whose eigenfunctions, for every supported boundary family, are plain
trigonometric kernels: cosine kernels (even, so the mirrored term adds
``-eps``) carry ``lambda = (1 - eps)*kappa^2`` and sine kernels carry
``lambda = (1 + eps)*kappa^2``, where ``kappa`` is the kernel frequency.
The families differ only in which frequencies are admitted:

=============  =======================  =======================  ========
family         branch 1                 branch 2                 constant
=============  =======================  =======================  ========
dirichlet      cos((k+1/2)x), k >= 0    sin(kx),       k >= 1    no
neumann        cos(kx),       k >= 1    sin((k+1/2)x), k >= 0    yes
periodic       cos(kx),       k >= 1    sin(kx),       k >= 1    yes
antiperiodic   sin((k+1/2)x), k >= 0    cos((k+1/2)x), k >= 0    no
=============  =======================  =======================  ========

Each branch also records the kernel used by the integrated-by-parts
third-derivative coefficient route: the opposite trig function at the
same frequency, with reconstruction sign +1 for cosine branches and -1
for sine branches (``data_coef = sign * d3_coef / kappa^3``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BcKind", "Branch", "ModeId", "BranchRule", "ModeScheme", "Kernel",
    "scheme", "modes", "eigenvalue", "basis_eval", "eigen_residual",
    "kernel", "deriv_kernel", "norm_constant", "parse_kind",
]


class BcKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"


class Branch(enum.IntEnum):
    CONSTANT = 0
    BRANCH1 = 1
    BRANCH2 = 2


@dataclass(frozen=True, order=True)
class ModeId:
    branch: Branch
    k: int


@dataclass(frozen=True)
class Kernel:
    """A concrete integration kernel: ``trig(kappa*x)`` or the constant 1."""

    trig: str      # "cos" | "sin" | "const"
    kappa: float
    name: str

    def __call__(self, x):
        if self.trig == "const":
            return np.ones_like(np.asarray(x, dtype=float))
        if self.trig == "cos":
            return np.cos(self.kappa * np.asarray(x, dtype=float))
        return np.sin(self.kappa * np.asarray(x, dtype=float))

    @property
    def norm_constant(self) -> float:
        """Value of the squared L2 norm over (-pi, pi)."""
        return 2.0 * math.pi if self.trig == "const" else math.pi


@dataclass(frozen=True)
class BranchRule:
    branch: Branch
    trig: str          # "cos" | "sin"
    half: bool         # kappa = k + 1/2 when True, else kappa = k
    k_start: int
    kernel_name: str

    def kappa(self, k: int) -> float:
        return k + 0.5 if self.half else float(k)

    @property
    def parity(self) -> int:
        """Kernel parity under x -> -x: +1 for cos, -1 for sin."""
        return 1 if self.trig == "cos" else -1

    def eps_factor(self, eps: float) -> float:
        """Eigenvalue prefactor: (1 - eps) for cos kernels, (1 + eps) for sin."""
        return 1.0 - self.parity * eps

    @property
    def swap_trig(self) -> str:
        return "sin" if self.trig == "cos" else "cos"

    @property
    def d3_sign(self) -> int:
        """Sign relating data coefficients to third-derivative coefficients."""
        return 1 if self.trig == "cos" else -1

    def _freq_name(self) -> str:
        return "(k+1/2)x" if self.half else "kx"

    def kernel_for(self, k: int) -> Kernel:
        return Kernel(self.trig, self.kappa(k), self.kernel_name)

    def deriv_kernel_for(self, k: int) -> Kernel:
        return Kernel(self.swap_trig, self.kappa(k),
                      f"{self.swap_trig}({self._freq_name()})")


def _rule(branch: Branch, trig: str, half: bool, k_start: int) -> BranchRule:
    freq = "(k+1/2)x" if half else "kx"
    return BranchRule(branch, trig, half, k_start, f"{trig}({freq})")


@dataclass(frozen=True)
class ModeScheme:
    kind: BcKind
    branches: tuple[BranchRule, ...]
    has_constant: bool

    def rule_for(self, branch: Branch) -> BranchRule:
        for rule in self.branches:
            if rule.branch == branch:
                return rule
        raise ValueError(f"{self.kind.value} has no branch {branch!r}")

    def admissible(self, mode: ModeId) -> bool:
        if mode.branch == Branch.CONSTANT:
            return self.has_constant and mode.k == 0
        for rule in self.branches:
            if rule.branch == mode.branch:
                return mode.k >= rule.k_start
        return False

    def modes(self, n_modes: int) -> list[ModeId]:
        """All admissible modes with branch index k <= n_modes."""
        out: list[ModeId] = []
        if self.has_constant:
            out.append(ModeId(Branch.CONSTANT, 0))
        for rule in self.branches:
            out.extend(ModeId(rule.branch, k)
                       for k in range(rule.k_start, n_modes + 1))
        return out


_SCHEMES: dict[BcKind, ModeScheme] = {
    BcKind.DIRICHLET: ModeScheme(
        BcKind.DIRICHLET,
        (_rule(Branch.BRANCH1, "cos", True, 0),
         _rule(Branch.BRANCH2, "sin", False, 1)),
        has_constant=False),
    BcKind.NEUMANN: ModeScheme(
        BcKind.NEUMANN,
        (_rule(Branch.BRANCH1, "cos", False, 1),
         _rule(Branch.BRANCH2, "sin", True, 0)),
        has_constant=True),
    BcKind.PERIODIC: ModeScheme(
        BcKind.PERIODIC,
        (_rule(Branch.BRANCH1, "cos", False, 1),
         _rule(Branch.BRANCH2, "sin", False, 1)),
        has_constant=True),
    BcKind.ANTIPERIODIC: ModeScheme(
        BcKind.ANTIPERIODIC,
        (_rule(Branch.BRANCH1, "sin", True, 0),
         _rule(Branch.BRANCH2, "cos", True, 0)),
        has_constant=False),
}


def parse_kind(name: str) -> BcKind:
    try:
        return BcKind(name.strip().lower())
    except ValueError:
        valid = ", ".join(k.value for k in BcKind)
        raise ValueError(
            f"unknown boundary condition kind {name!r}; valid kinds: {valid}"
        ) from None


def scheme(kind: BcKind) -> ModeScheme:
    return _SCHEMES[kind]


def modes(kind: BcKind, n_modes: int) -> list[ModeId]:
    return _SCHEMES[kind].modes(n_modes)


def _check_eps(eps: float) -> None:
    if not abs(eps) < 1.0:
        raise ValueError(f"coupling strength must satisfy |eps| < 1, got {eps!r}")


def _check_mode(kind: BcKind, mode: ModeId) -> None:
    if not _SCHEMES[kind].admissible(mode):
        raise ValueError(f"mode {mode} is not admissible for {kind.value}")


def eigenvalue(kind: BcKind, mode: ModeId, eps: float) -> float:
    _check_eps(eps)
    _check_mode(kind, mode)
    if mode.branch == Branch.CONSTANT:
        return 0.0
    rule = _SCHEMES[kind].rule_for(mode.branch)
    kap = rule.kappa(mode.k)
    return rule.eps_factor(eps) * kap * kap


def kernel(kind: BcKind, mode: ModeId) -> Kernel:
    _check_mode(kind, mode)
    if mode.branch == Branch.CONSTANT:
        return Kernel("const", 0.0, "1")
    return _SCHEMES[kind].rule_for(mode.branch).kernel_for(mode.k)


def deriv_kernel(kind: BcKind, mode: ModeId) -> Kernel:
    """Kernel for the third-derivative coefficient integral of this mode
    (opposite trig at the mode's own frequency)."""
    _check_mode(kind, mode)
    if mode.branch == Branch.CONSTANT:
        return Kernel("const", 0.0, "1")
    return _SCHEMES[kind].rule_for(mode.branch).deriv_kernel_for(mode.k)


def basis_eval(kind: BcKind, mode: ModeId, x):
    """Eigenfunction value(s) at x (scalar in, scalar out)."""
    values = kernel(kind, mode)(x)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(values)
    return values


def norm_constant(kind: BcKind, mode: ModeId) -> float:
    return kernel(kind, mode).norm_constant


def _second_derivative(kind: BcKind, mode: ModeId, x):
    if mode.branch == Branch.CONSTANT:
        return np.zeros_like(np.asarray(x, dtype=float))
    rule = _SCHEMES[kind].rule_for(mode.branch)
    kap = rule.kappa(mode.k)
    return -(kap * kap) * kernel(kind, mode)(x)


def eigen_residual(kind: BcKind, mode: ModeId, eps: float, x):
    """Residual of X''(x) - eps*X''(-x) + lambda*X(x) at the point(s) x.

    Zero up to roundoff for every admissible mode; evaluated from the
    pieces rather than simplified so it is a genuine consistency check.
    """
    _check_eps(eps)
    _check_mode(kind, mode)
    lam = eigenvalue(kind, mode, eps)
    xs = np.asarray(x, dtype=float)
    res = (_second_derivative(kind, mode, xs)
           - eps * _second_derivative(kind, mode, -xs)
           + lam * kernel(kind, mode)(xs))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(res)
    return res
