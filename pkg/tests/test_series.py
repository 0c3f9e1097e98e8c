import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmonoid.errors import SpaceMismatch, ValidationError
from opmonoid.series import (
    CoefficientSeries,
    SpaceTag,
    add,
    cauchy_product,
    format_series,
    inner_product,
    norm_sq,
    parse_series,
    scale,
)

S = parse_series

# keep squares away from underflow so positivity is decidable
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False).filter(
    lambda x: x == 0 or abs(x) > 1e-100
)
cplx = st.builds(complex, finite, finite)
series_st = st.lists(cplx, min_size=0, max_size=8).map(CoefficientSeries.from_coeffs)


def test_add_examples():
    assert add(S("1,-1"), S("0,1")) == S("1")
    assert add(CoefficientSeries.zero(), S("3,2")) == S("3,2")
    assert add(S("0,1,1"), S("0,0,1,1")) == S("0,1,2,1")


def test_add_space_tags():
    a = S("0,1", SpaceTag.H2_ZERO)
    assert add(a, a).space is SpaceTag.H2_ZERO
    assert add(a, S("1")).space is SpaceTag.H2


def test_scale_examples():
    assert scale(2, S("0,1")) == S("0,2")
    assert scale(0, S("1,2,3")).is_zero()
    assert norm_sq(scale(1 / math.sqrt(2), S("1,-1"))) == pytest.approx(1.0, abs=1e-15)


def test_inner_product_examples():
    assert inner_product(S("0,1"), S("0,1")) == 1
    assert inner_product(S("1,-1"), S("1,1,-1,-1")) == 0
    assert inner_product(S("1"), S("1,1,1")) == 1
    assert inner_product(S("1i"), S("1")) == 1j
    assert inner_product(S("1"), S("1i")) == -1j


def test_norm_sq_examples():
    assert norm_sq(S("1,-1")) == 2
    assert norm_sq(CoefficientSeries.zero()) == 0
    assert norm_sq(S("0,1,1,1")) == 3


def test_cauchy_product_examples():
    assert cauchy_product(S("1,1"), S("1,0,-1"), 3) == S("1,1,-1,-1")
    h = S("2,-1,0.5")
    assert cauchy_product(S("1"), h, 5) == h
    assert cauchy_product(S("1,-1"), S("1,1,1,1"), 3) == S("1")


def test_cauchy_product_rejects_negative_degree():
    with pytest.raises(ValidationError):
        cauchy_product(S("1"), S("1"), -1)


def test_degree_and_zero_marker():
    assert S("0,0,3,0,0").degree() == 2
    assert CoefficientSeries.zero().degree() is None
    assert S("0,0").degree() is None


def test_trailing_zeros_do_not_matter():
    assert S("1,2") == S("1,2,0,0")
    assert S("1,2") != S("1,2,0,1e-300")


def test_h2_zero_requires_vanishing_constant():
    with pytest.raises(SpaceMismatch):
        S("1,1", SpaceTag.H2_ZERO)
    assert S("0,1", SpaceTag.H2_ZERO).space is SpaceTag.H2_ZERO


def test_immutable():
    s = S("1,2")
    with pytest.raises(ValueError):
        s.coeffs[0] = 5


@pytest.mark.parametrize("text", ["1,2i,-3.5-0.25i", "0", "1e-300,-2.5e10i", "0.1+0.2i"])
def test_literal_round_trip(text):
    s = S(text)
    assert S(format_series(s)) == s


@pytest.mark.parametrize("bad", ["1,,2", "a", "1,nan", "inf"])
def test_bad_literals(bad):
    with pytest.raises(ValidationError):
        S(bad)


@given(series_st)
def test_round_trip_property(a):
    assert S(format_series(a)) == a


@given(series_st, series_st)
def test_conjugate_symmetry_is_exact(a, b):
    assert inner_product(a, b) == inner_product(b, a).conjugate()


@given(series_st)
def test_positivity(a):
    n = norm_sq(a)
    assert n >= 0
    assert (n == 0) == a.is_zero()


@given(series_st, series_st, series_st)
def test_linearity(a, b, c):
    lhs = inner_product(add(a, b), c)
    rhs = inner_product(a, c) + inner_product(b, c)
    scale_ = max(1.0, math.sqrt(norm_sq(a) + norm_sq(b)) * math.sqrt(norm_sq(c)))
    assert abs(lhs - rhs) <= 1e-12 * scale_


@settings(max_examples=50)
@given(series_st, series_st, series_st)
def test_cauchy_product_commutative_associative(a, b, c):
    D = 30
    ab_c = cauchy_product(cauchy_product(a, b, D), c, D)
    a_bc = cauchy_product(a, cauchy_product(b, c, D), D)
    bound = 1e-12 * max(1.0, float(np.sum(np.abs(ab_c.coeffs))))
    assert ab_c.allclose(a_bc, atol=bound)
    assert cauchy_product(a, b, D).allclose(cauchy_product(b, a, D), atol=bound)
