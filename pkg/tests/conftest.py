import pytest

from mirrorheat import QuadratureRule, solve
from mirrorheat.kernels import warmup

from corpus import CASES, build_spec


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Compile the jit kernels once so timed tests measure steady state."""
    warmup()


@pytest.fixture(scope="session")
def quad_rule():
    return QuadratureRule.gauss_legendre(512)


@pytest.fixture(scope="session")
def corpus_solutions():
    """Solve every corpus instance once and share across tests."""
    out = {}
    for case in CASES:
        spec = build_spec(case)
        out[case.label] = (case, spec, solve(spec))
    return out
