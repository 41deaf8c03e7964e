"""Exact coefficient ring: canonical reduction and numeric evaluation."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhboson.ring import RingElem


def test_rho_fourth_power_reduces_to_base():
    assert RingElem.rho(4) == RingElem.gamma(2) + RingElem.rational(1)


def test_rho_inverse():
    assert RingElem.rho(-1) * RingElem.rho(1) == RingElem.one()
    assert RingElem.rho(-2) * RingElem.rho(2) == RingElem.one()


def test_omega_squared_is_base():
    om = RingElem.omega()
    assert om * om == RingElem.rational(1) + RingElem.gamma(2)


def test_equality_is_canonical():
    # (1+g^2) * x / (1+g^2) must collapse back to x
    x = RingElem.gamma() * Fraction(3, 7) + RingElem.rho(1)
    base = RingElem.rational(1) + RingElem.gamma(2)
    assert x * base * RingElem.rho(-4) == x
    assert not (x - x)


def test_gamma_negation():
    e = RingElem.gamma() + RingElem.gamma(2) * 2 + RingElem.rho(1)
    f = e.gamma_negated()
    assert f == -RingElem.gamma() + RingElem.gamma(2) * 2 + RingElem.rho(1)
    assert f.gamma_negated() == e


@pytest.mark.parametrize("gamma0", [0.0, 0.25, 0.5, -0.75, 1.5])
def test_evaluate_matches_direct_float(gamma0):
    # rho evaluates to the quarter power, denominators to inverse powers
    base = 1 + gamma0**2
    e = RingElem.rho(3) * Fraction(1, 2) + RingElem.gamma() * RingElem.rho(-1)
    direct = 0.5 * base**0.75 + gamma0 * base**-0.25
    assert e.evaluate(gamma0) == pytest.approx(direct, rel=1e-14)


def test_evaluate_omega():
    assert RingElem.omega().evaluate(0.75) == pytest.approx(1.25, rel=1e-15)
    assert RingElem.omega().evaluate(0.5) == pytest.approx(math.sqrt(1.25), rel=1e-15)


_scalars = st.builds(Fraction, st.integers(-8, 8), st.integers(1, 6))


@st.composite
def ring_elems(draw):
    e = RingElem.zero()
    for _ in range(draw(st.integers(0, 3))):
        part = RingElem.rational(draw(_scalars))
        part = part * RingElem.gamma(draw(st.integers(0, 2)))
        part = part * RingElem.rho(draw(st.integers(-2, 3)))
        e = e + part
    return e


@settings(max_examples=60, deadline=None)
@given(ring_elems(), ring_elems(), ring_elems())
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a * b == b * a
    assert a + (-a) == RingElem.zero()


@settings(max_examples=40, deadline=None)
@given(ring_elems(), ring_elems(), st.floats(-0.9, 0.9))
def test_evaluate_is_homomorphism(a, b, gamma0):
    prod = (a * b).evaluate(gamma0)
    direct = a.evaluate(gamma0) * b.evaluate(gamma0)
    assert prod == pytest.approx(direct, rel=1e-12, abs=1e-12)
