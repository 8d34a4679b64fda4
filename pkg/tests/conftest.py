import pytest

from freqlock import perturbation as pt
from freqlock import wronskian as wr
from freqlock.forcing import Forcing
from freqlock.lienard import SystemParams, find_limit_cycle


@pytest.fixture(scope="session")
def cycle():
    return find_limit_cycle(SystemParams(5.0, 4.0))


@pytest.fixture(scope="session")
def core(cycle):
    return wr.variational_core(cycle)


@pytest.fixture(scope="session")
def wdata(cycle, core):
    return wr.build(cycle, p=2, q=1, core=core)


@pytest.fixture(scope="session")
def kernels(cycle, wdata):
    return pt.kernel_functions(cycle, wdata)


@pytest.fixture(scope="session")
def harmonic():
    return Forcing.harmonic()


@pytest.fixture(scope="session")
def poisson2():
    return Forcing.poisson_kernel(2.0)
