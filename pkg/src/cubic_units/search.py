"""Bounded exhaustive search for u1 + u2 = n in Z[rho].

For a unit u the quantity N(t - u) is the characteristic polynomial
``t^3 - T t^2 + S t - N(u)`` of u, so ``t - u`` is a unit exactly when this
cubic takes the value +-1.  Writing the condition as
``t (t^2 - T t + S) = N(u) + e`` with ``e = +-1`` leaves two cases: the right
side is 0 (then t is a root of the quadratic) or +-2 (then t divides 2).
Each u1 in the exponent box therefore costs O(1) big-integer operations,
independent of the range of n.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cubic_core import (
    CubicParams,
    OrderElement,
    UnitRepr,
    _delta,
    _eps,
    _inverse,
    _mul,
    _mul_rho,
    _pow,
    _second_symmetric,
    _trace,
    exponents_from_unit,
)
from .embeddings import build_context
from .errors import DomainError, MismatchAgainstFixture, VerificationFailed
from .solutions import EquivalenceClass, SolutionTriple, canonical_key, classify, orbit

__all__ = [
    "SearchConfig",
    "SearchResult",
    "icbrt",
    "theorem_n_max",
    "unit_candidates",
    "solve_bounded",
    "solve_many",
    "load_table_fixture",
    "reproduce_table",
    "conjecture_scan",
    "classes_to_csv",
]

log = logging.getLogger(__name__)

NON_RIGOROUS_CAVEAT = (
    "bounded search: complete only for solution classes with a member whose "
    "u1 exponents lie in the box max(|x|,|y|) <= x_max"
)


def icbrt(n: int) -> int:
    """Floor of the real cube root of ``|n|``."""
    n = abs(n)
    if n < 2**52:
        r = int(round(n ** (1 / 3)))
    else:
        # integer Newton from above converges to the floor
        r = 1 << ((n.bit_length() + 2) // 3)
        while True:
            s = (2 * r + n // (r * r)) // 3
            if s >= r:
                break
            r = s
    while r * r * r > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def theorem_n_max(a: int) -> int:
    """``max(floor(|a|^(1/3)), 1)``, the n-range of the main theorem."""
    return max(icbrt(a), 1)


@dataclass(frozen=True)
class SearchConfig:
    params: CubicParams
    n_max: int
    x_max: int = 30
    include_trivial: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")
        if self.x_max < 1:
            raise DomainError("x_max must be >= 1")

    @classmethod
    def theorem(cls, a: int, x_max: int = 30, include_trivial: bool = False) -> "SearchConfig":
        return cls(CubicParams(a), theorem_n_max(a), x_max, include_trivial)


@dataclass
class SearchResult:
    config: SearchConfig
    triples: List[SolutionTriple]
    classes: List[EquivalenceClass]
    families: List[str] = field(default_factory=list)
    class_of: Dict[SolutionTriple, EquivalenceClass] = field(default_factory=dict, repr=False)

    @property
    def sporadic(self) -> List[EquivalenceClass]:
        return [c for c in self.classes if not c.trivial]

    @property
    def trivial(self) -> List[EquivalenceClass]:
        return [c for c in self.classes if c.trivial]

    def sporadic_triples(self) -> List[SolutionTriple]:
        return [t for t in self.triples if not self.class_of[t].trivial]

    def to_json(self) -> dict:
        return {
            "a": self.config.params.a,
            "n_max": self.config.n_max,
            "x_max": self.config.x_max,
            "families": list(self.families),
            "sporadic": [c.to_json() for c in self.sporadic],
            "trivial": [c.to_json() for c in self.trivial],
            "sporadic_triples": len(self.sporadic_triples()),
        }


def unit_candidates(a: int, u, norm_u: int, n_max: int) -> List[int]:
    """All t with 0 < |t| <= n_max such that ``t - u`` is a unit."""
    T = _trace(a, u)
    S = _second_symmetric(a, u)
    hits = []
    D = T * T - 4 * S
    if D >= 0:
        r = math.isqrt(D)
        if r * r == D and (T + r) % 2 == 0:
            for t in {(T + r) // 2, (T - r) // 2}:
                if t and abs(t) <= n_max:
                    hits.append(t)
    for t in (1, -1, 2, -2):
        if abs(t) <= n_max and t not in hits:
            if t * t * t - T * t * t + S * t - norm_u in (1, -1):
                hits.append(t)
    return hits


def _spiral_rank(x: int, y: int) -> Tuple[int, int, int]:
    return (max(abs(x), abs(y)), x, y)


def _scan_box(a: int, n_max: int, x_max: int) -> List[Tuple[int, int, int, int]]:
    """Raw hits ``(n, s, x1, y1)`` of the exponent box, unordered."""
    eps_c, delta_c = _eps(a), _delta(a)
    delta_inv = _inverse(a, delta_c)
    left = _pow(a, _inverse(a, eps_c), x_max)
    d_row = _pow(a, delta_inv, x_max)
    hits = []
    for y in range(-x_max, x_max + 1):
        norm_u = -1 if y % 2 else 1
        u = _mul(a, left, d_row)
        for x in range(-x_max, x_max + 1):
            for t in unit_candidates(a, u, norm_u, n_max):
                hits.append((abs(t), 1 if t > 0 else -1, x, y))
            u = _mul_rho(a, u)
        d_row = _mul(a, d_row, delta_c)
    return hits


def solve_bounded(cfg: SearchConfig) -> SearchResult:
    """Every solution ``(u1, n - u1, n)`` with ``1 <= n <= n_max`` and u1 in the box."""
    p = cfg.params
    a = p.a
    hits = _scan_box(a, cfg.n_max, cfg.x_max)
    hits.sort(key=lambda h: (h[0], -h[1], _spiral_rank(h[2], h[3])))
    ctx = build_context(p, 96)
    triples: List[SolutionTriple] = []
    for n, s, x, y in hits:
        u1 = UnitRepr(s, x, y, p)
        e2 = OrderElement.from_int(n, p) - u1.element
        u2 = exponents_from_unit(e2, ctx)
        sol = SolutionTriple(u1, u2, n)
        sol.check()
        triples.append(sol)

    by_key: Dict[Tuple[int, ...], EquivalenceClass] = {}
    classes_of = {}
    for t in triples:
        if t in classes_of:
            continue
        cls = classify(t)
        for member in orbit(cls.representative):
            classes_of[member] = cls
        by_key.setdefault(canonical_key(cls.representative), cls)
    classes = sorted(by_key.values(), key=lambda c: canonical_key(c.representative))
    families = []
    if cfg.include_trivial:
        families.append("(u,-u,0)")
    else:
        classes = [c for c in classes if not c.trivial]
        triples = [t for t in triples if not classes_of[t].trivial]
    return SearchResult(cfg, triples, classes, families, classes_of)


def _solve_job(args):
    a, n_max, x_max, include_trivial = args
    return solve_bounded(SearchConfig(CubicParams(a), n_max, x_max, include_trivial))


def solve_many(
    configs: Sequence[Tuple[int, int, int, bool]], jobs: int = 1
) -> List[SearchResult]:
    """Run several searches, in input order, optionally across processes."""
    configs = list(configs)
    if jobs <= 1 or len(configs) <= 1:
        return [_solve_job(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_job, configs, chunksize=max(1, len(configs) // (8 * jobs))))


# --- sporadic table fixture --------------------------------------------------


def load_table_fixture(path: Optional[str] = None) -> List[dict]:
    if path is None:
        text = resources.files("cubic_units").joinpath("data/sporadic_table.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)["rows"]


def _fixture_solution(row: dict) -> SolutionTriple:
    p = CubicParams(int(row["a"]))
    sol = SolutionTriple(
        UnitRepr.from_json(row["u1"], p), UnitRepr.from_json(row["u2"], p), int(row["n"])
    )
    for key, u in (("u1", sol.u1), ("u2", sol.u2)):
        if [int(c) for c in row[key]["c"]] != list(u.element.coords):
            raise MismatchAgainstFixture(
                f"fixture row a={p.a} #{row['index']}: {key} coordinates do not match its exponents",
                {"row": row},
            )
    try:
        sol.check()
    except VerificationFailed as exc:
        raise MismatchAgainstFixture(f"fixture row a={p.a} #{row['index']} is not a solution: {exc}")
    return sol


TABLE_A_RANGE = (-1, 100)
TABLE_X_MAX = 30
TABLE_EXPECTED_TRIPLES = 60
TABLE_EXPECTED_CLASSES = 10


def reproduce_table(
    a_range: Tuple[int, int] = TABLE_A_RANGE,
    x_max: int = TABLE_X_MAX,
    jobs: int = 1,
    fixture_path: Optional[str] = None,
) -> dict:
    """Search every a in ``a_range`` with the theorem's n-range and compare with the fixture."""
    fixture = load_table_fixture(fixture_path)
    a_lo, a_hi = a_range
    results = solve_many([(a, theorem_n_max(a), x_max, False) for a in range(a_lo, a_hi + 1)], jobs)

    found: Dict[int, set] = {}
    classes = []
    n_triples = 0
    for res in results:
        a = res.config.params.a
        n_triples += sum(1 for t in res.triples if t.n >= 1)
        for c in res.sporadic:
            found.setdefault(a, set()).add(canonical_key(c.representative))
            classes.append(c)
    expected: Dict[int, set] = {}
    for row in fixture:
        a = int(row["a"])
        if a_lo <= a <= a_hi:
            expected.setdefault(a, set()).add(canonical_key(classify(_fixture_solution(row)).representative))

    diff = {}
    for a in sorted(set(found) | set(expected)):
        missing = expected.get(a, set()) - found.get(a, set())
        extra = found.get(a, set()) - expected.get(a, set())
        if missing or extra:
            diff[a] = {"missing": sorted(missing), "extra": sorted(extra)}

    report = {
        "a_range": [a_lo, a_hi],
        "x_max": x_max,
        "sporadic_triples": n_triples,
        "sporadic_classes": len(classes),
        "per_a": {str(a): len(v) for a, v in sorted(found.items())},
        "all_n_one": all(abs(c.representative.n) == 1 for c in classes),
        "max_a": max((c.params.a for c in classes), default=None),
        "classes": [c.to_json() for c in classes],
    }
    if diff:
        raise MismatchAgainstFixture(f"reproduced classes differ from the fixture at a={sorted(diff)}", diff)
    if (a_lo, a_hi) == TABLE_A_RANGE and (
        n_triples != TABLE_EXPECTED_TRIPLES or len(classes) != TABLE_EXPECTED_CLASSES
    ):
        raise MismatchAgainstFixture(
            f"expected {TABLE_EXPECTED_TRIPLES} triples in {TABLE_EXPECTED_CLASSES} classes, "
            f"got {n_triples} in {len(classes)}",
            {"triples": n_triples, "classes": len(classes)},
        )
    return report


def conjecture_scan(a_max: int, n_max: int, x_max: int, jobs: int = 1, a_min: int = -1) -> dict:
    """Sporadic classes for ``a_min <= a <= a_max`` and ``1 <= n <= n_max``.

    Not a proof of completeness: only solutions reachable from the exponent
    box are seen.
    """
    if a_max < a_min or n_max < 1:
        raise DomainError("need a_max >= a_min and n_max >= 1")
    results = solve_many([(a, n_max, x_max, False) for a in range(a_min, a_max + 1)], jobs)
    classes = [c for r in results for c in r.sporadic]
    per_a = {}
    for c in classes:
        per_a.setdefault(c.params.a, []).append(abs(c.representative.n))
    return {
        "a_range": [a_min, a_max],
        "n_max": n_max,
        "x_max": x_max,
        "sporadic_classes": len(classes),
        "max_abs_n": max((abs(c.representative.n) for c in classes), default=None),
        "max_a": max((c.params.a for c in classes), default=None),
        "per_a": {str(a): {"classes": len(ns), "max_n": max(ns)} for a, ns in sorted(per_a.items())},
        "classes": [c.to_json() for c in classes],
        "caveat": NON_RIGOROUS_CAVEAT,
    }


CSV_HEADER = [
    "a", "n", "s1", "x1", "y1", "s2", "x2", "y2",
    "u1_c0", "u1_c1", "u1_c2", "u2_c0", "u2_c1", "u2_c2", "orbit_size", "trivial",
]


def classes_to_csv(classes: Iterable) -> str:
    """One CSV row per class; accepts EquivalenceClass objects or their JSON."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in classes:
        d = c.to_json() if isinstance(c, EquivalenceClass) else c
        u1, u2 = d["u1"], d["u2"]
        w.writerow(
            [d["a"], d["n"], u1["s"], u1["x"], u1["y"], u2["s"], u2["x"], u2["y"]]
            + list(u1["c"]) + list(u2["c"])
            + [d["orbit_size"], d["trivial"] or ""]
        )
    return buf.getvalue()
