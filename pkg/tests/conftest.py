import numpy as np
import pytest
from hypothesis import settings

from bmotv.acceptance import zoo
from bmotv.bvfun import Analytic, CantorComponent, Domain, Jump, SmoothPiece

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

UNIT = Domain.interval(0, 1)

# numpy renamed trapz in 2.0
trapezoid = getattr(np, "trapezoid", None) or np.trapz


def linear(slope=1.0, domain=UNIT):
    return Analytic(domain, (SmoothPiece(domain.a, domain.b, (0.0, slope)),))


def heaviside(at=0.5, left=0.0, right=1.0, domain=UNIT):
    return Analytic(domain, (), (Jump(at, left, right),))


def cantor(rise=1.0, ratio=1 / 3, depth=40, domain=UNIT):
    return Analytic(domain, (), (), (CantorComponent(domain.a, domain.b, rise, ratio, depth),))


@pytest.fixture
def identity():
    return zoo("identity")


@pytest.fixture
def step():
    return zoo("heaviside")


@pytest.fixture
def mixed():
    return zoo("mixed")


@pytest.fixture
def staircase():
    return zoo("cantor")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
