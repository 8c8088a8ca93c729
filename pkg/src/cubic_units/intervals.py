"""Thin helpers over mpmath's outward-rounding interval context.

Each precision gets its own ``MPIntervalContext`` so no global state is
mutated; interval values stay valid when mixed across contexts.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from functools import lru_cache

from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

from .errors import PrecisionExhausted

PRECISION_START = 96
PRECISION_CAP = 2**16


@lru_cache(maxsize=64)
def ivcontext(prec: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = int(prec)
    return ctx


def precision_ladder(start: int = PRECISION_START, cap: int = PRECISION_CAP):
    p = max(int(start), 2)
    while p <= cap:
        yield p
        p *= 2


def _mpf_to_fraction(t) -> Fraction:
    sign, man, exp, bc = t
    man, exp = int(man), int(exp)
    if not man:
        if t == libmp.fzero:
            return Fraction(0)
        raise PrecisionExhausted("interval endpoint is infinite or NaN")
    v = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -v if sign else v


def endpoints(x):
    """Exact rational endpoints ``(lo, hi)`` of an interval value."""
    lo, hi = x._mpi_
    return _mpf_to_fraction(lo), _mpf_to_fraction(hi)


def lower(x) -> Fraction:
    return endpoints(x)[0]


def upper(x) -> Fraction:
    return endpoints(x)[1]


def width(x) -> Fraction:
    lo, hi = endpoints(x)
    return hi - lo


def contains(x, value) -> bool:
    lo, hi = endpoints(x)
    return lo <= Fraction(value) <= hi


def certainly_less(x, y) -> bool:
    """True iff every point of ``x`` is strictly below every point of ``y``."""
    return upper(x) < lower(y)


def dyadic(ctx: MPIntervalContext, lo_man: int, hi_man: int, exp: int):
    """The exact interval ``[lo_man * 2^exp, hi_man * 2^exp]``."""
    return ctx.make_mpf((libmp.from_man_exp(lo_man, exp), libmp.from_man_exp(hi_man, exp)))


def from_fraction(ctx: MPIntervalContext, q: Fraction):
    q = Fraction(q)
    return ctx.mpf(q.numerator) / q.denominator


def decimal_down(q: Fraction, digits: int = 30) -> str:
    return _decimal(q, digits, decimal.ROUND_FLOOR)


def decimal_up(q: Fraction, digits: int = 30) -> str:
    return _decimal(q, digits, decimal.ROUND_CEILING)


def _decimal(q: Fraction, digits: int, rounding) -> str:
    q = Fraction(q)
    with decimal.localcontext() as dctx:
        dctx.prec = digits
        dctx.rounding = rounding
        dctx.Emax = decimal.MAX_EMAX
        dctx.Emin = decimal.MIN_EMIN
        value = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
    return str(value)


def parse_decimal(s: str) -> Fraction:
    return Fraction(decimal.Decimal(s))
