import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eitsim.errors import BracketError
from eitsim.optimize import bisect, golden_section


@given(st.floats(-5.0, 5.0))
def test_golden_section_finds_parabola_vertex(c):
    x, fx = golden_section(lambda x: (x - c) ** 2 + 1.0, -10.0, 10.0, xtol=1e-10)
    # a smooth minimum is flat to rounding within sqrt(eps) of the vertex
    assert abs(x - c) < 1e-7
    assert abs(fx - 1.0) < 1e-15


@given(st.floats(-5.0, 5.0))
def test_golden_section_resolves_kink_to_xtol(c):
    x, _ = golden_section(lambda x: abs(x - c), -10.0, 10.0, xtol=1e-10)
    assert abs(x - c) <= 1e-10


def test_golden_section_returns_boundary_minimum():
    x, fx = golden_section(lambda x: x, 2.0, 3.0)
    assert x == 2.0 and fx == 2.0
    x, fx = golden_section(lambda x: -x, 2.0, 3.0)
    assert x == 3.0


def test_golden_section_flat_function_prefers_smaller_x():
    x, _ = golden_section(lambda x: 0.0, 0.0, 1.0)
    assert x == 0.0


def test_bisect_locates_switch():
    x = bisect(lambda x: x > math.pi / 4, 0.0, 1.0, xtol=1e-12)
    assert abs(x - math.pi / 4) < 1e-12


@pytest.mark.parametrize("pred", [lambda x: True, lambda x: False, lambda x: x < 0.5])
def test_bisect_requires_bracket(pred):
    with pytest.raises(BracketError):
        bisect(pred, 0.0, 1.0)
