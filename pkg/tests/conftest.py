import pytest

from psdfact import SolverConfig, factorize, gen_planted, gen_planted_tensor, tensor_factorize


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # First call through each kernel pays the jit compile (cached on disk);
    # doing it once up front keeps per-test timings honest.
    x, _ = gen_planted(4, 4, 2, seed=0)
    factorize(x, SolverConfig(r=2, max_sweeps=2, seed=0))
    t, _ = gen_planted_tensor(2, 2, seed=0)
    tensor_factorize(t, SolverConfig(r=2, max_sweeps=2, seed=0))
