"""Certified enclosures of the real embeddings of Z[rho].

The largest root rho1 of f_a is bracketed with exact integer sign checks, so
its enclosure is sound regardless of floating point.  The other two roots
follow from the exact Galois relations rho2 = -1 - 1/rho1 and
rho3 = -1/(1 + rho1), evaluated in outward-rounded interval arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

from .cubic_core import CubicParams, OrderElement
from .errors import DomainError, PrecisionExhausted
from .intervals import PRECISION_CAP, dyadic, endpoints, ivcontext, width

__all__ = [
    "EmbeddingContext",
    "build_context",
    "signed_log_abs",
    "conjugate",
    "rho1_bracket",
]


def _scaled_f(a: int, m: int, k: int) -> int:
    """``2^(3k) * f_a(m / 2^k)``, exactly."""
    s = 1 << k
    return m * m * m - a * m * m * s - (a + 3) * m * s * s - s * s * s


def _integer_bracket(a: int) -> int:
    """Integer m with f(m) < 0 < f(m+1) around the largest root."""
    if a >= 2:
        # a+1 < rho1 < a+2
        m = a + 1
    else:
        # only rho1 is positive; scan down from a+3 where f > 0
        m = a + 3
        while _scaled_f(a, m, 0) > 0:
            m -= 1
    if not (_scaled_f(a, m, 0) < 0 < _scaled_f(a, m + 1, 0)):
        raise DomainError(f"no sign change of f_{a} on ({m}, {m + 1})")
    return m


def rho1_bracket(a: int, k: int) -> int:
    """Return m with ``m/2^k < rho1 < (m+1)/2^k``, certified by exact signs.

    Integer Newton from the right of the root (f is convex there), then a
    final exact sign check with bisection fallback.
    """
    m0 = _integer_bracket(a)
    s = 1 << k
    lo, hi = m0 * s, (m0 + 1) * s
    m = hi
    while True:
        fm = _scaled_f(a, m, k)
        dfm = 3 * m * m - 2 * a * m * s - (a + 3) * s * s
        step = fm // dfm
        if step <= 0:
            break
        m -= step
    m = min(max(m, lo), hi - 1)
    for _ in range(4):
        if _scaled_f(a, m, k) > 0:
            m -= 1
        elif _scaled_f(a, m + 1, k) < 0:
            m += 1
        else:
            break
    if not (_scaled_f(a, m, k) < 0 < _scaled_f(a, m + 1, k)):
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _scaled_f(a, mid, k) < 0:
                lo = mid
            else:
                hi = mid
        m = lo
    return m


@dataclass(frozen=True)
class EmbeddingContext:
    """Interval enclosures of the roots and fundamental-unit logarithms."""

    params: CubicParams
    precision: int
    rho1: object = field(repr=False)
    rho2: object = field(repr=False)
    rho3: object = field(repr=False)
    log_eps: object = field(repr=False)
    log_delta: object = field(repr=False)
    log_ratio: object = field(repr=False)
    working_precision: int = field(repr=False, default=0)

    @property
    def iv(self):
        return ivcontext(self.working_precision)

    def root(self, index: int):
        if index == 1:
            return self.rho1
        if index == 2:
            return self.rho2
        if index == 3:
            return self.rho3
        raise ValueError(f"embedding index must be 1, 2 or 3, not {index}")

    def conjugate(self, e: OrderElement, index: int):
        return conjugate(e, self, index)

    def signed_log_abs(self, e: OrderElement, index: int):
        return signed_log_abs(e, self, index)

    def log_a(self):
        return self.iv.log(self.iv.mpf(self.params.a))

    def solve_log_system(self, e: OrderElement) -> Optional[Tuple[int, int, int]]:
        """Sign and rounded exponents of a unit, or None if not yet resolved.

        Uses ``log|e^(i)| = x log|eps^(i)| + y log|delta^(i)|`` for i = 1, 2,
        with eps^(1) = rho1, delta^(1) = -rho2, eps^(2) = rho2, delta^(2) = -rho3.
        """
        iv = self.iv
        l1 = signed_log_abs(e, self, 1)
        l2 = signed_log_abs(e, self, 2)
        e1, d1 = self.log_eps, self.log_delta
        e2, d2 = self.log_delta, iv.log(-self.rho3)
        det = e1 * d2 - d1 * e2
        x = (l1 * d2 - d1 * l2) / det
        y = (e1 * l2 - e2 * l1) / det
        if width(x) >= 0.25 or width(y) >= 0.25:
            return None
        xl, xh = endpoints(x)
        yl, yh = endpoints(y)
        xr, yr = round((xl + xh) / 2), round((yl + yh) / 2)
        lo, hi = endpoints(conjugate(e, self, 1))
        sign = 1 if lo > 0 else -1
        return sign, int(xr), int(yr)


def _guard_bits(a: int) -> int:
    # log(delta) ~ 1/a loses about log2(a) relative bits to cancellation
    return 2 * (abs(a) + 3).bit_length() + 24


@lru_cache(maxsize=512)
def build_context(params: CubicParams, precision: int = 96) -> EmbeddingContext:
    """Certified enclosures for ``params`` at ``precision`` binary digits."""
    a = params.a
    if a < -1:
        raise DomainError(f"a must be >= -1 (normalize first), got {a}")
    if precision < 64:
        raise DomainError("precision must be at least 64 bits")
    if precision > PRECISION_CAP:
        raise PrecisionExhausted(f"precision {precision} exceeds cap {PRECISION_CAP}")
    wp = precision + _guard_bits(a)
    iv = ivcontext(wp)
    k = wp + 8
    m = rho1_bracket(a, k)
    rho1 = dyadic(iv, m, m + 1, -k)
    rho2 = -1 - 1 / rho1
    rho3 = -1 / (1 + rho1)
    log_eps = iv.log(rho1)
    log_delta = iv.log(-rho2)
    ctx = EmbeddingContext(
        params=params,
        precision=precision,
        rho1=rho1,
        rho2=rho2,
        rho3=rho3,
        log_eps=log_eps,
        log_delta=log_delta,
        log_ratio=log_delta / log_eps,
        working_precision=wp,
    )
    lo, _ = endpoints(log_eps)
    dlo, _ = endpoints(log_delta)
    if lo <= 0 or dlo <= 0:
        raise PrecisionExhausted(f"cannot certify positive logarithms for a={a}")
    return ctx


def conjugate(e: OrderElement, ctx: EmbeddingContext, index: int):
    """Enclosure of ``c0 + c1*rho_i + c2*rho_i^2``."""
    if e.params != ctx.params:
        raise DomainError(f"element has a={e.a}, context a={ctx.params.a}")
    r = ctx.root(index)
    iv = ctx.iv
    return iv.mpf(e.c0) + r * (iv.mpf(e.c1) + r * iv.mpf(e.c2))


def signed_log_abs(e: OrderElement, ctx: EmbeddingContext, index: int):
    """Enclosure of ``log|e^(i)|``; PrecisionExhausted if ``e^(i)`` may be 0."""
    if e.c0 == 0 and e.c1 == 0 and e.c2 == 0:
        raise DomainError("log of zero")
    v = conjugate(e, ctx, index)
    lo, hi = endpoints(v)
    if lo <= 0 <= hi:
        raise PrecisionExhausted(
            f"conjugate {index} of {e} not separated from 0 at {ctx.precision} bits"
        )
    return ctx.iv.log(abs(v))
