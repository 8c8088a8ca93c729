"""Solution triples of u1 + u2 = n and their order-12 equivalence classes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, NamedTuple, Optional, Tuple

from .cubic_core import CubicParams, OrderElement, UnitRepr
from .embeddings import EmbeddingContext, build_context, signed_log_abs
from .errors import CertificationFailed, DomainError, NotAUnit, PrecisionExhausted, VerificationFailed
from .intervals import PRECISION_CAP, lower, upper

__all__ = [
    "SolutionTriple",
    "EquivalenceClass",
    "TrivialCheck",
    "orbit",
    "canonicalize",
    "canonical_key",
    "is_trivial",
    "classify",
    "galois_choice",
    "good_representative",
]


@dataclass(frozen=True)
class SolutionTriple:
    """``(u1, u2, n)``; construction does not validate, call :meth:`check`."""

    u1: UnitRepr
    u2: UnitRepr
    n: int

    def __post_init__(self):
        if self.u1.params != self.u2.params:
            raise DomainError("u1 and u2 belong to different orders")

    @property
    def params(self) -> CubicParams:
        return self.u1.params

    @property
    def e1(self) -> OrderElement:
        return self.u1.element

    @property
    def e2(self) -> OrderElement:
        return self.u2.element

    def is_solution(self) -> bool:
        return self.e1 + self.e2 == OrderElement.from_int(self.n, self.params)

    def check(self) -> "SolutionTriple":
        if self.e1.norm() not in (1, -1) or self.e2.norm() not in (1, -1):
            raise NotAUnit(f"{self} contains a non-unit")
        if not self.is_solution():
            raise VerificationFailed(f"{self.e1} + {self.e2} != {self.n}")
        return self

    def negate(self) -> "SolutionTriple":
        return SolutionTriple(-self.u1, -self.u2, -self.n)

    def swap(self) -> "SolutionTriple":
        return SolutionTriple(self.u2, self.u1, self.n)

    def sigma(self, times: int = 1) -> "SolutionTriple":
        return SolutionTriple(self.u1.sigma(times), self.u2.sigma(times), self.n)

    @property
    def max_exponent(self) -> int:
        return max(abs(self.u1.x), abs(self.u1.y), abs(self.u2.x), abs(self.u2.y))

    def to_json(self) -> dict:
        def unit(u: UnitRepr) -> dict:
            d = {"c": [str(c) for c in u.element.coords]}
            d.update(u.to_json())
            return d

        return {"a": self.params.a, "n": self.n, "u1": unit(self.u1), "u2": unit(self.u2)}

    @classmethod
    def from_json(cls, obj: dict) -> "SolutionTriple":
        params = CubicParams(int(obj["a"]))
        sol = cls(UnitRepr.from_json(obj["u1"], params), UnitRepr.from_json(obj["u2"], params), int(obj["n"]))
        for key, u in (("u1", sol.u1), ("u2", sol.u2)):
            if "c" in obj[key] and [int(c) for c in obj[key]["c"]] != list(u.element.coords):
                raise VerificationFailed(f"{key} coordinates disagree with its exponents")
        return sol

    def __str__(self):
        return f"({self.e1}, {self.e2}, {self.n}) = ({self.u1}, {self.u2}) [a={self.params.a}]"


class TrivialCheck(NamedTuple):
    trivial: bool
    family: Optional[str]

    def __bool__(self):
        return self.trivial


@dataclass(frozen=True)
class EquivalenceClass:
    representative: SolutionTriple
    orbit_size: int
    family: Optional[str] = None

    @property
    def trivial(self) -> bool:
        return self.family is not None

    @property
    def params(self) -> CubicParams:
        return self.representative.params

    def to_json(self) -> dict:
        d = self.representative.to_json()
        d["orbit_size"] = self.orbit_size
        d["trivial"] = self.family
        return d


def orbit(sol: SolutionTriple) -> FrozenSet[SolutionTriple]:
    """Closure of ``sol`` under sign change, swap and sigma."""
    seen = {sol}
    todo = [sol]
    while todo:
        s = todo.pop()
        for t in (s.negate(), s.swap(), s.sigma()):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def canonical_key(sol: SolutionTriple) -> Tuple[int, ...]:
    n = sol.n
    sgn = (n > 0) - (n < 0)
    u1, u2 = sol.u1, sol.u2
    return (-sgn, abs(n), u1.x, u1.y, u1.sign, u2.x, u2.y, u2.sign)


def canonicalize(sol: SolutionTriple) -> SolutionTriple:
    return min(orbit(sol), key=canonical_key)


_FAMILY_112 = "(1,1,2)"
_FAMILY_ZERO = "(u,-u,0)"
_FAMILY_RHO = "(rho+1,-rho,1)"


def is_trivial(sol: SolutionTriple) -> TrivialCheck:
    if sol.n == 0:
        # the whole orbit has n = 0 as well
        return TrivialCheck(True, _FAMILY_ZERO)
    p = sol.params
    one = UnitRepr(1, 0, 0, p)
    rho_plus_one = UnitRepr(1, 1, 1, p)
    minus_rho = UnitRepr(-1, 1, 0, p)
    orb = orbit(sol)
    if SolutionTriple(one, one, 2) in orb:
        return TrivialCheck(True, _FAMILY_112)
    if SolutionTriple(rho_plus_one, minus_rho, 1) in orb:
        return TrivialCheck(True, _FAMILY_RHO)
    return TrivialCheck(False, None)


def classify(sol: SolutionTriple) -> EquivalenceClass:
    orb = orbit(sol)
    return EquivalenceClass(min(orb, key=canonical_key), len(orb), is_trivial(sol).family)


def galois_choice(x2: int, y2: int, X: int) -> Tuple[str, int]:
    """Case label and power k of sigma that makes ``sigma^k(u2)`` large.

    Requires ``X = max(|x2|, |y2|) >= 1``.  Comparisons with X/2 are done on
    doubled integers.
    """
    if X < 1 or max(abs(x2), abs(y2)) != X:
        raise DomainError(f"u2 exponents ({x2}, {y2}) do not realize X={X}")
    if x2 == X:
        return "1", 0
    if x2 == -X:
        return ("2.1", 2) if 2 * y2 >= -X else ("2.2", 1)
    if y2 == X:
        return ("3.1", 0) if 2 * x2 >= X else ("3.2", 2)
    return "4", 1


def _certify_large(u2: UnitRepr, X: int, ctx: EmbeddingContext) -> None:
    """Check ``|u2^(1)| > a^(X/2)`` using the exact coordinates of u2."""
    e = u2.element
    prec = ctx.precision
    while prec <= PRECISION_CAP:
        c = ctx if prec == ctx.precision else build_context(ctx.params, prec)
        try:
            lhs = signed_log_abs(e, c, 1)
        except PrecisionExhausted:
            prec *= 2
            continue
        rhs = c.log_a() * X / 2
        if lower(lhs) > upper(rhs):
            return
        prec *= 2
    raise CertificationFailed(f"|{u2}| > a^({X}/2) not certified for a={ctx.params.a}")


def good_representative(sol: SolutionTriple, ctx: EmbeddingContext | None = None) -> SolutionTriple:
    """An equivalent triple with ``u1 > 0`` and certified ``|u2| > a^(X/2)``.

    X is the largest exponent magnitude of ``sol``.  The triple is first
    swapped so that u2 carries X, then conjugated by the sigma-power picked
    by :func:`galois_choice`.
    """
    p = sol.params
    if p.a <= 100:
        raise DomainError(f"good_representative needs a > 100, got {p.a}")
    X = sol.max_exponent
    if X < 1:
        raise DomainError("X = 0: both units are +-1")
    if ctx is None:
        ctx = build_context(p, 96)
    if max(abs(sol.u2.x), abs(sol.u2.y)) < X:
        sol = sol.swap()
    _, k = galois_choice(sol.u2.x, sol.u2.y, X)
    out = sol.sigma(k)
    if out.u1.sign < 0:
        # eps, delta > 0 at the first embedding, so the sign is the sign of u1
        out = out.negate()
    _certify_large(out.u2, X, ctx)
    return out
