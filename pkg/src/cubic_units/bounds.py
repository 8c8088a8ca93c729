"""Upper and lower bounds on the largest exponent X of a sporadic solution.

All values are interval enclosures; decisions are taken only on disjoint
intervals.  Besides the final formulas the module keeps the constants of the
derivation of the upper bound so each intermediate inequality can be
replayed (:func:`upper_bound_derivation`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple

from mpmath import libmp

from .cubic_core import CubicParams
from .errors import DomainError
from .intervals import decimal_down, decimal_up, endpoints, ivcontext, lower, upper

__all__ = [
    "BoundsReport",
    "laurent_lower_bound",
    "upper_bound_X",
    "lower_bound_X",
    "bounds_report",
    "absolute_parameter_bound",
    "upper_bound_derivation",
    "DerivationStep",
]

BOUND_PRECISION = 128

# Laurent, two logarithms
LAURENT_C = "17.9"
LAURENT_SHIFT = "0.38"
LAURENT_FLOOR = 30  # 30/D

# specialised constants of the upper bound
UPPER_FACTOR = 343
UPPER_OFFSET = 10
UPPER_SLOPE = "1.7"
X_SPLIT = 200_000
SLACK = "0.24"
SLACK_FACTOR = "1.02"

REFERENCE_PARAMETER_BOUND = 148_000


def _iv(prec: int = BOUND_PRECISION):
    return ivcontext(prec)


def _num(iv, v):
    if isinstance(v, str):
        return iv.mpf(v)
    if isinstance(v, Fraction):
        return iv.mpf(v.numerator) / v.denominator
    return iv.mpf(v) if isinstance(v, (int, float)) else v


def laurent_lower_bound(D: int, logA1, logA2, b1: int, b2: int, prec: int = BOUND_PRECISION):
    """Enclosure of ``-17.9 D^4 max(log b' + 0.38, 30/D, 1)^2 log A1 log A2``."""
    iv = _iv(prec)
    if D < 1 or b1 < 1 or b2 < 1:
        raise DomainError("D, b1, b2 must be positive")
    la1, la2 = _num(iv, logA1), _num(iv, logA2)
    inv_d = iv.mpf(1) / D
    if not (lower(la1) >= upper(inv_d) or lower(la1 - inv_d) >= 0):
        raise DomainError("log A1 must be >= 1/D")
    if not (lower(la2) >= upper(inv_d) or lower(la2 - inv_d) >= 0):
        raise DomainError("log A2 must be >= 1/D")
    b_prime = iv.mpf(b1) / (D * la2) + iv.mpf(b2) / (D * la1)
    m = _imax(iv, iv.log(b_prime) + iv.mpf(LAURENT_SHIFT), iv.mpf(LAURENT_FLOOR) / D)
    m = _imax(iv, m, iv.mpf(1))
    return -iv.mpf(LAURENT_C) * iv.mpf(D) ** 4 * m * m * la1 * la2


def _imax(iv, x, y):
    """Interval enclosure of max(x, y)."""
    (xl, xh), (yl, yh) = x._mpi_, y._mpi_
    pick = lambda s, t: s if libmp.mpf_cmp(s, t) >= 0 else t
    return iv.make_mpf((pick(xl, yl), pick(xh, yh)))


def _check_a(params: CubicParams) -> int:
    if params.a <= 100:
        raise DomainError(f"bound formulas need a > 100, got a={params.a}")
    return params.a


def upper_bound_X(params: CubicParams, prec: int = BOUND_PRECISION):
    """Enclosure of ``343 log a (10 + 1.7 log log a)^2``."""
    a = _check_a(params)
    iv = _iv(prec)
    la = iv.log(iv.mpf(a))
    t = UPPER_OFFSET + iv.mpf(UPPER_SLOPE) * iv.log(la)
    return UPPER_FACTOR * la * t * t


def lower_bound_X(params: CubicParams, prec: int = BOUND_PRECISION):
    """Enclosure of ``(a + 2)(log(a + 1) - log 2) / 2``."""
    a = _check_a(params)
    iv = _iv(prec)
    return iv.mpf(a + 2) * (iv.log(iv.mpf(a + 1)) - iv.log(iv.mpf(2))) / 2


@dataclass(frozen=True)
class BoundsReport:
    params: CubicParams
    upper_X: object
    lower_X: object
    laurent_inputs: dict

    @property
    def contradiction(self) -> bool:
        return upper(self.upper_X) < lower(self.lower_X)

    def to_json(self) -> dict:
        ul, uh = endpoints(self.upper_X)
        ll, lh = endpoints(self.lower_X)
        return {
            "a": self.params.a,
            "upper_X": [decimal_down(ul, 20), decimal_up(uh, 20)],
            "lower_X": [decimal_down(ll, 20), decimal_up(lh, 20)],
            "contradiction": self.contradiction,
            "laurent_inputs": self.laurent_inputs,
        }


def bounds_report(params: CubicParams) -> BoundsReport:
    iv = _iv()
    log_a = iv.log(iv.mpf(params.a + 3)) / 3
    return BoundsReport(
        params,
        upper_bound_X(params),
        lower_bound_X(params),
        {"D": 3, "logA1": decimal_up(upper(log_a), 20), "logA2": decimal_up(upper(log_a), 20),
         "b_prime": "(|x1-x2| + |y1-y2|) / log(a+3)"},
    )


def _gap(a: int):
    p = CubicParams(a)
    return lower_bound_X(p) - upper_bound_X(p)


def _certified_contradiction(a: int) -> bool:
    return lower(_gap(a)) > 0


def _slope_gap_certified(a0: int) -> bool:
    """Certify that lower_X - upper_X is increasing on [a0, oo).

    d/da lower_X = (log(a+1) - log 2)/2 + (a+2)/(2(a+1)) is increasing, and
    d/da upper_X = 343 (10 + 1.7 L)(13.4 + 1.7 L)/a with L = log log a is
    decreasing once (10 + 1.7 L)(13.4 + 1.7 L) > 1.7 (23.4 + 3.4 L)/log a,
    which holds for all a >= 16.  Comparing the two derivatives at a0 then
    covers the whole ray.
    """
    if a0 < 16:
        return False
    iv = _iv()
    a = iv.mpf(a0)
    la = iv.log(a)
    L = iv.log(la)
    k = iv.mpf(UPPER_SLOPE)
    d_upper = UPPER_FACTOR * (UPPER_OFFSET + k * L) * (UPPER_OFFSET + 2 * k + k * L) / a
    d_lower = (iv.log(a + 1) - iv.log(iv.mpf(2))) / 2 + (a + 2) / (2 * (a + 1))
    # the decreasing condition at a0 (it only gets easier as a grows)
    lhs = (UPPER_OFFSET + k * L) * (UPPER_OFFSET + 2 * k + k * L)
    rhs = k * (2 * UPPER_OFFSET + 2 * k + 2 * k * L) / la
    return upper(d_upper) < lower(d_lower) and upper(rhs) < lower(lhs)


def absolute_parameter_bound(a0: int = 100_000, a_hi: int = 150_000) -> int:
    """Least A with lower_X(a) > upper_X(a) certified for every a > A.

    The gap is shown increasing on [a0, oo), then the crossing is located
    by bisection on certified signs; an uncertified evaluation counts as
    "no contradiction", which can only move A upwards.
    """
    if not _slope_gap_certified(a0):
        raise DomainError(f"cannot certify monotone gap from a0={a0}")
    if _certified_contradiction(a0):
        raise DomainError(f"gap already positive at a0={a0}; choose a smaller a0")
    while not _certified_contradiction(a_hi):
        a_hi *= 2
    lo, hi = a0, a_hi  # invariant: not certified at lo, certified at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _certified_contradiction(mid):
            hi = mid
        else:
            lo = mid
    return lo


class DerivationStep(NamedTuple):
    name: str
    holds: bool
    detail: str


def upper_bound_derivation(a_min: int = 101) -> List[DerivationStep]:
    """Replay the numeric inequalities behind ``X < 343 log a (10 + 1.7 log log a)^2``.

    Every step is an interval comparison valid for all a >= a_min and
    X > 200000, using monotonicity in a and X where needed.
    """
    iv = _iv()
    steps = []
    la_min = iv.log(iv.mpf(a_min))
    log_x_split = iv.log(iv.mpf(X_SPLIT))

    # log 4 - log log(a+3) + 0.38 < 0.24, worst case at the smallest a
    v = iv.log(iv.mpf(4)) - iv.log(iv.log(iv.mpf(a_min + 3))) + iv.mpf(LAURENT_SHIFT)
    steps.append(DerivationStep("log4 - loglog(a+3) + 0.38 < 0.24", upper(v) < lower(iv.mpf(SLACK)), str(v)))

    # log X + 0.24 < 1.02 log X  <=>  0.24 < 0.02 log X, tightest at X = 200000
    v = iv.mpf("0.02") * log_x_split
    steps.append(DerivationStep("log X + 0.24 < 1.02 log X for X > 200000", upper(iv.mpf(SLACK)) < lower(v), str(v)))

    # log X > 12 > 10 = 30/D so the max in Laurent is the log term
    steps.append(DerivationStep("log X > 12 for X > 200000", lower(log_x_split) > 12, str(log_x_split)))

    # 17.9 * 3^4 * 1.02^2 / 3^2 = 167.61...
    c = Fraction(LAURENT_C) * 81 * Fraction(SLACK_FACTOR) ** 2 / 9
    steps.append(DerivationStep("17.9*81*1.02^2/9 <= 167.61", c <= Fraction("167.61"), str(float(c))))

    # 167.61 (log X)^2 (log(a+3))^2 + log 2 + (1/3) log a < 168 (log X)^2 (log(a+3))^2
    lX2 = log_x_split ** 2
    l3 = iv.log(iv.mpf(a_min + 3)) ** 2
    extra = iv.log(iv.mpf(2)) + la_min / 3
    # log 2 + log(a)/3 grows slower than 0.39 (log X)^2 (log(a+3))^2
    ok = upper(extra) < lower(iv.mpf("0.39") * lX2 * l3)
    steps.append(DerivationStep("log2 + loga/3 < 0.39 (logX)^2 (log(a+3))^2", ok, str(extra)))

    # log(a+3) < 1.01 log a for a >= a_min (ratio decreasing in a)
    r = iv.log(iv.mpf(a_min + 3)) / la_min
    steps.append(DerivationStep("log(a+3) < 1.01 log a", upper(r) < lower(iv.mpf("1.01")), str(r)))

    # 168 * 2 * 1.01^2 < 343
    c = 168 * 2 * Fraction("1.01") ** 2
    steps.append(DerivationStep("2*168*1.01^2 < 343", c < 343, str(float(c))))

    # log 343 < 5.9
    v = iv.log(iv.mpf(343))
    steps.append(DerivationStep("log 343 < 5.9", upper(v) < lower(iv.mpf("5.9")), str(v)))

    # 2 log log X < 0.41 log X for X > 200000 (0.41 t - 2 log t increases for t > 4.9)
    v = iv.mpf("0.41") * log_x_split - 2 * iv.log(log_x_split)
    steps.append(DerivationStep("2 loglog X < 0.41 log X for X > 200000", lower(v) > 0, str(v)))

    # 5.9/0.59 = 10 and 1/0.59 < 1.7, so 5.9/0.59 + loglog a/0.59 < 10 + 1.7 loglog a
    w, v = Fraction("5.9") / Fraction("0.59"), 1 / Fraction("0.59")
    steps.append(DerivationStep("5.9/0.59 <= 10 and 1/0.59 < 1.7", w <= 10 and v < Fraction(UPPER_SLOPE), f"{w} {float(v)}"))

    # case split: the bound itself exceeds 200000 at a = 101, so X <= 200000 is covered
    ub = upper_bound_X(CubicParams(a_min))
    steps.append(DerivationStep("343 log a (10+1.7 loglog a)^2 > 200000 at a_min", lower(ub) > X_SPLIT, str(ub)))
    return steps
