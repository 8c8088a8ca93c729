from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubic_units.cubic_core import CubicParams, OrderElement, UnitRepr, delta
from cubic_units.embeddings import build_context, rho1_bracket
from cubic_units.errors import DomainError, PrecisionExhausted
from cubic_units.intervals import contains, endpoints, lower, upper, width

from oracles import rho_roots


def bisect_rho1(a, lo, hi, steps=60):
    f = lambda x: x**3 - a * x**2 - (a + 3) * x - 1
    lo, hi = Fraction(lo), Fraction(hi)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo


def test_rho1_at_minus_one_matches_bisection():
    ctx = build_context(CubicParams(-1), 96)
    ref = bisect_rho1(-1, 1, 2)
    lo, hi = endpoints(ctx.rho1)
    assert abs(lo - Fraction("1.24698")) < Fraction(1, 10**4)
    assert lo <= ref + Fraction(1, 2**59) and ref <= hi + Fraction(1, 2**59)


@pytest.mark.parametrize("a", [101, 1000, 148000])
def test_rho1_root_bounds(a):
    ctx = build_context(CubicParams(a), 96)
    assert a + 1 < lower(ctx.rho1) and upper(ctx.rho1) < a + 2


@pytest.mark.parametrize("a", [-1, 0, 1, 2, 3, 50, 10**4, 10**6, 10**12])
def test_roots_enclose_oracle(a):
    ctx = build_context(CubicParams(a), 128)
    roots = [Fraction(mpmath.nstr(z, 70)) for z in rho_roots(a, 80)]
    hit = set()
    for i in (1, 2, 3):
        r = ctx.root(i)
        assert width(r) < Fraction(1, 2**100)
        lo, hi = endpoints(r)
        near = [j for j, z in enumerate(roots) if lo - Fraction(1, 10**45) <= z <= hi + Fraction(1, 10**45)]
        assert len(near) == 1
        hit.add(near[0])
    assert hit == {0, 1, 2}


@settings(max_examples=100, deadline=None)
@given(a=st.integers(-1, 10**9), k=st.integers(8, 200))
def test_rho1_bracket_is_certified(a, k):
    m = rho1_bracket(a, k)
    f = lambda x: x**3 - a * x**2 - (a + 3) * x - 1
    assert f(Fraction(m, 2**k)) < 0 < f(Fraction(m + 1, 2**k))


@pytest.mark.parametrize("a", [-1, 0, 101])
def test_log_of_rho_in_root_interval(a):
    p = CubicParams(a)
    ctx = build_context(p, 96)
    l = ctx.signed_log_abs(OrderElement.rho(p), 1)
    if a == 101:
        iv = ctx.iv
        assert lower(iv.log(iv.mpf(a + 1))) < lower(l) and upper(l) < upper(iv.log(iv.mpf(a + 2)))
    one = ctx.signed_log_abs(OrderElement.from_int(1, p), 2)
    assert contains(one, 0) and width(one) <= Fraction(1, 2**64)


def test_log_delta_at_101_matches_high_precision():
    p = CubicParams(101)
    ctx = build_context(p, 96)
    l = ctx.signed_log_abs(delta(p), 1)
    with mpmath.workdps(256):
        r1 = rho_roots(101, 256)[0]
        ref = Fraction(mpmath.nstr(mpmath.log(1 + 1 / r1), 200))
        lo_b = Fraction(mpmath.nstr(mpmath.log(1 + mpmath.mpf(1) / 103), 60))
        hi_b = Fraction(mpmath.nstr(mpmath.log(1 + mpmath.mpf(1) / 102), 60))
    lo, hi = endpoints(l)
    assert lo - Fraction(1, 2**90) <= ref <= hi + Fraction(1, 2**90)
    assert lo_b < lo and hi < hi_b


@pytest.mark.parametrize("a", [-1, 2, 101, 5000])
def test_conjugates_multiply_to_norm(a):
    p = CubicParams(a)
    ctx = build_context(p, 128)
    e = OrderElement(3, -2, 5, p)
    prod = ctx.conjugate(e, 1) * ctx.conjugate(e, 2) * ctx.conjugate(e, 3)
    assert contains(prod, e.norm())
    # eps and delta are positive at the first embedding
    assert lower(ctx.conjugate(UnitRepr(1, 4, -3, p).element, 1)) > 0


def test_domain_errors():
    with pytest.raises(DomainError):
        build_context(CubicParams(-2))
    with pytest.raises(DomainError):
        build_context(CubicParams(5), 32)
    with pytest.raises(ValueError):
        build_context(CubicParams(5)).root(4)
    p = CubicParams(5)
    with pytest.raises(DomainError):
        build_context(p).signed_log_abs(OrderElement.from_int(0, p), 1)


def test_precision_exhausted_on_huge_unit_at_low_precision():
    # eps^600 delta^-600 has conjugates spanning far more than 96 bits; the
    # first embedding of its small conjugate cannot be separated from 0
    p = CubicParams(1000)
    ctx = build_context(p, 96)
    e = UnitRepr(1, -600, 0, p).element
    with pytest.raises(PrecisionExhausted):
        ctx.signed_log_abs(e, 1)


def test_higher_precision_gives_narrower_enclosures():
    p = CubicParams(777)
    w = [width(build_context(p, prec).log_ratio) for prec in (96, 192, 384)]
    assert w[0] > w[1] > w[2] > 0
