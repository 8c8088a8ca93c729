"""Exact arithmetic in the order Z[rho], rho a root of x^3 - a x^2 - (a+3) x - 1.

Elements are stored as coordinate triples in the power basis (1, rho, rho^2)
with Python integers, so nothing here ever rounds.  The fundamental units are
``eps = rho`` and ``delta = -sigma(rho) = rho^2 - a rho - (a + 2)``; every unit
of Z[rho] is ``s * eps**x * delta**y`` for a unique sign and exponent pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Tuple

from .errors import NotAUnit, ParameterMismatch, PrecisionExhausted, VerificationFailed

__all__ = [
    "CubicParams",
    "OrderElement",
    "UnitRepr",
    "normalize_parameter",
    "elem_mul",
    "norm",
    "trace",
    "second_symmetric",
    "apply_sigma",
    "unit_from_exponents",
    "invert_unit",
    "exponents_from_unit",
    "disc_sqrt",
    "eps",
    "delta",
]

Coords = Tuple[int, int, int]


@dataclass(frozen=True, order=True)
class CubicParams:
    """The parameter ``a`` of the family, usually normalized to ``a >= -1``."""

    a: int

    def __post_init__(self):
        if not isinstance(self.a, int) or isinstance(self.a, bool):
            raise TypeError(f"a must be an int, got {type(self.a).__name__}")

    @property
    def is_normalized(self) -> bool:
        return self.a >= -1

    def poly(self, x):
        """Evaluate f_a at ``x`` (works for ints, Fractions and intervals)."""
        a = self.a
        return x * x * x - a * x * x - (a + 3) * x - 1


def normalize_parameter(a: int) -> CubicParams:
    """Map ``a`` to the equivalent parameter ``>= -1`` (K_a = K_{-a-3})."""
    a = int(a)
    return CubicParams(a if a >= -1 else -a - 3)


def disc_sqrt(params: CubicParams) -> int:
    """Positive square root ``a^2 + 3a + 9`` of the discriminant of f_a."""
    a = params.a
    return a * a + 3 * a + 9


# --- raw coordinate kernels (also used by the search inner loop) -----------


def _mul(a: int, u: Coords, v: Coords) -> Coords:
    u0, u1, u2 = u
    v0, v1, v2 = v
    p0 = u0 * v0
    p1 = u0 * v1 + u1 * v0
    p2 = u0 * v2 + u1 * v1 + u2 * v0
    p3 = u1 * v2 + u2 * v1
    p4 = u2 * v2
    # rho^3 = 1 + (a+3) rho + a rho^2
    # rho^4 = a + (a^2+3a+1) rho + (a^2+a+3) rho^2
    return (
        p0 + p3 + a * p4,
        p1 + (a + 3) * p3 + (a * a + 3 * a + 1) * p4,
        p2 + a * p3 + (a * a + a + 3) * p4,
    )


def _mul_rho(a: int, u: Coords) -> Coords:
    u0, u1, u2 = u
    return (u2, u0 + (a + 3) * u2, u1 + a * u2)


def _norm(a: int, c: Coords) -> int:
    c0, c1, c2 = c
    aa = a * a
    return (
        c0 * c0 * c0
        + c1 * c1 * c1
        + c2 * c2 * c2
        + a * c0 * c0 * c1
        + (aa + 2 * a + 6) * c0 * c0 * c2
        - (a + 3) * c0 * c1 * c1
        - (aa + 3 * a + 3) * c0 * c1 * c2
        + (aa + 4 * a + 9) * c0 * c2 * c2
        + a * c1 * c1 * c2
        - (a + 3) * c1 * c2 * c2
    )


def _trace(a: int, c: Coords) -> int:
    return 3 * c[0] + a * c[1] + (a * a + 2 * a + 6) * c[2]


def _second_symmetric(a: int, c: Coords) -> int:
    c0, c1, c2 = c
    aa = a * a
    return (
        3 * c0 * c0
        + 2 * a * c0 * c1
        + 2 * (aa + 2 * a + 6) * c0 * c2
        - (a + 3) * c1 * c1
        - (aa + 3 * a + 3) * c1 * c2
        + (aa + 4 * a + 9) * c2 * c2
    )


def _sigma(a: int, c: Coords) -> Coords:
    # sigma(rho) = (a+2) + a rho - rho^2, sigma(rho)^2 = (a^2+3a+4) + (a^2+a+1) rho - (a+1) rho^2
    c0, c1, c2 = c
    return (
        c0 + (a + 2) * c1 + (a * a + 3 * a + 4) * c2,
        a * c1 + (a * a + a + 1) * c2,
        -c1 - (a + 1) * c2,
    )


def _pow(a: int, base: Coords, k: int) -> Coords:
    result: Coords = (1, 0, 0)
    while k:
        if k & 1:
            result = _mul(a, result, base)
        k >>= 1
        if k:
            base = _mul(a, base, base)
    return result


def _inverse(a: int, c: Coords) -> Coords:
    nm = _norm(a, c)
    if nm not in (1, -1):
        raise NotAUnit(f"element {c} has norm {nm}")
    s1 = _sigma(a, c)
    adj = _mul(a, s1, _sigma(a, s1))
    return (nm * adj[0], nm * adj[1], nm * adj[2])


def _eps(a: int) -> Coords:
    return (0, 1, 0)


def _delta(a: int) -> Coords:
    return (-a - 2, -a, 1)


@lru_cache(maxsize=4096)
def _unit_bases(a: int) -> Tuple[Coords, Coords, Coords, Coords]:
    e, d = _eps(a), _delta(a)
    return e, _inverse(a, e), d, _inverse(a, d)


def _unit_coords(a: int, s: int, x: int, y: int) -> Coords:
    e, e_inv, d, d_inv = _unit_bases(a)
    u = _mul(a, _pow(a, e if x >= 0 else e_inv, abs(x)), _pow(a, d if y >= 0 else d_inv, abs(y)))
    if s < 0:
        u = (-u[0], -u[1], -u[2])
    return u


# --- public value types ---------------------------------------------------


@dataclass(frozen=True)
class OrderElement:
    """An element ``c0 + c1*rho + c2*rho^2`` of Z[rho]."""

    c0: int
    c1: int
    c2: int
    params: CubicParams

    @classmethod
    def from_int(cls, n: int, params: CubicParams) -> "OrderElement":
        return cls(int(n), 0, 0, params)

    @classmethod
    def rho(cls, params: CubicParams) -> "OrderElement":
        return cls(0, 1, 0, params)

    @property
    def coords(self) -> Coords:
        return (self.c0, self.c1, self.c2)

    @property
    def a(self) -> int:
        return self.params.a

    def _wrap(self, c: Coords) -> "OrderElement":
        return OrderElement(c[0], c[1], c[2], self.params)

    def _coerce(self, other) -> "OrderElement":
        if isinstance(other, OrderElement):
            if other.params != self.params:
                raise ParameterMismatch(f"a={self.a} vs a={other.a}")
            return other
        if isinstance(other, int):
            return OrderElement.from_int(other, self.params)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap((self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap((-self.c0, -self.c1, -self.c2))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return elem_mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return invert_unit(self) ** (-k)
        return self._wrap(_pow(self.a, self.coords, k))

    def is_rational(self) -> bool:
        return self.c1 == 0 and self.c2 == 0

    def norm(self) -> int:
        return norm(self)

    def sigma(self, times: int = 1) -> "OrderElement":
        c = self.coords
        for _ in range(times % 3):
            c = _sigma(self.a, c)
        return self._wrap(c)

    def to_json(self) -> dict:
        return {"a": self.a, "c": [str(self.c0), str(self.c1), str(self.c2)]}

    @classmethod
    def from_json(cls, obj: dict) -> "OrderElement":
        c0, c1, c2 = (int(v) for v in obj["c"])
        return cls(c0, c1, c2, CubicParams(int(obj["a"])))

    def __str__(self):
        terms = []
        for coeff, mono in ((self.c2, "rho^2"), (self.c1, "rho"), (self.c0, "")):
            if coeff == 0:
                continue
            if mono and abs(coeff) == 1:
                body = mono
            else:
                body = f"{abs(coeff)}{'*' + mono if mono else ''}"
            terms.append(("-" if coeff < 0 else "+", body))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])


@dataclass(frozen=True, order=True)
class UnitRepr:
    """The unit ``sign * eps**x * delta**y``."""

    sign: int
    x: int
    y: int
    params: CubicParams

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @cached_property
    def element(self) -> OrderElement:
        return unit_from_exponents(self)

    @property
    def norm(self) -> int:
        # N(eps) = 1, N(delta) = -1, N(-1) = -1
        return self.sign * (-1 if self.y % 2 else 1)

    def __neg__(self) -> "UnitRepr":
        return UnitRepr(-self.sign, self.x, self.y, self.params)

    def sigma(self, times: int = 1) -> "UnitRepr":
        """Galois image using sigma(eps) = -delta and sigma(delta) = eps^-1 delta^-1."""
        s, x, y = self.sign, self.x, self.y
        for _ in range(times % 3):
            s, x, y = s * (-1 if x % 2 else 1), -y, x - y
        return UnitRepr(s, x, y, self.params)

    def to_json(self) -> dict:
        return {"s": self.sign, "x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, obj: dict, params: CubicParams) -> "UnitRepr":
        return cls(int(obj["s"]), int(obj["x"]), int(obj["y"]), params)

    def __str__(self):
        return f"{'-' if self.sign < 0 else ''}eps^{self.x}*delta^{self.y}"


def eps(params: CubicParams) -> OrderElement:
    return OrderElement(*_eps(params.a), params)


def delta(params: CubicParams) -> OrderElement:
    return OrderElement(*_delta(params.a), params)


def elem_mul(e1: OrderElement, e2: OrderElement) -> OrderElement:
    if e1.params != e2.params:
        raise ParameterMismatch(f"a={e1.a} vs a={e2.a}")
    return e1._wrap(_mul(e1.a, e1.coords, e2.coords))


def norm(e: OrderElement) -> int:
    """Exact norm, i.e. the determinant of multiplication by ``e``."""
    return _norm(e.a, e.coords)


def trace(e: OrderElement) -> int:
    return _trace(e.a, e.coords)


def second_symmetric(e: OrderElement) -> int:
    """Sum of pairwise products of the conjugates of ``e``."""
    return _second_symmetric(e.a, e.coords)


def apply_sigma(e: OrderElement) -> OrderElement:
    return e._wrap(_sigma(e.a, e.coords))


def invert_unit(e: OrderElement) -> OrderElement:
    """Inverse of a unit as ``N(e) * sigma(e) * sigma^2(e)``; raises NotAUnit otherwise."""
    return e._wrap(_inverse(e.a, e.coords))


def unit_from_exponents(u: UnitRepr) -> OrderElement:
    c = _unit_coords(u.params.a, u.sign, u.x, u.y)
    return OrderElement(c[0], c[1], c[2], u.params)


EXPONENT_PRECISION_START = 96
EXPONENT_PRECISION_CAP = 2**16


def exponents_from_unit(e: OrderElement, ctx=None) -> UnitRepr:
    """Recover ``(s, x, y)`` with ``e = s * eps**x * delta**y``.

    Solves the 2x2 system of log-absolute values at the first two real
    embeddings in interval arithmetic, rounds, then checks the answer by exact
    reconstruction.  ``ctx`` is an optional EmbeddingContext whose precision is
    used as the first rung of the precision ladder.
    """
    from . import embeddings

    nm = norm(e)
    if nm not in (1, -1):
        raise NotAUnit(f"{e} has norm {nm}")
    if e.is_rational():
        return UnitRepr(e.c0, 0, 0, e.params)

    # start where the coordinates' cancellation can plausibly be resolved
    need = 2 * max(abs(c).bit_length() for c in e.coords) + 64
    prec = EXPONENT_PRECISION_START if ctx is None else max(ctx.precision, EXPONENT_PRECISION_START)
    while prec < need:
        prec *= 2
    while prec <= EXPONENT_PRECISION_CAP:
        cx = ctx if ctx is not None and ctx.precision == prec else embeddings.build_context(e.params, prec)
        try:
            sol = cx.solve_log_system(e)
        except PrecisionExhausted:
            prec *= 2
            continue
        if sol is None:
            prec *= 2
            continue
        sign, x, y = sol
        u = UnitRepr(sign, x, y, e.params)
        if unit_from_exponents(u) != e:
            raise VerificationFailed(f"reconstruction of {e} from {u} failed")
        return u
    raise PrecisionExhausted(f"cannot certify exponents of {e} below {EXPONENT_PRECISION_CAP} bits")
