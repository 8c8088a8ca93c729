"""Continued-fraction reduction of the exponent bound, one parameter at a time.

For each a > 100 the first convergent p/q of log(delta)/log(eps) with
q >= 2 * upper_X(a) gives c = |p - q * ratio|, and every sporadic solution
would need X < (2 / log a) * log(2 a^(1/3) / (c log a)).  When that is below
the elementary lower bound for X, no sporadic solution exists for this a.
Results are written as JSONL certificates that :func:`verify_certificate`
replays from (a, p, q) alone.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .bounds import lower_bound_X, upper_bound_X
from .cubic_core import CubicParams
from .embeddings import build_context
from .errors import DomainError, PrecisionExhausted
from .intervals import (
    PRECISION_CAP,
    decimal_down,
    decimal_up,
    endpoints,
    from_fraction,
    ivcontext,
    parse_decimal,
    precision_ladder,
)

__all__ = [
    "ReductionCertificate",
    "SweepSummary",
    "convergents_until",
    "q_threshold",
    "initial_precision",
    "reduce_parameter",
    "reduced_upper_bound",
    "sweep",
    "read_certificates",
    "verify_certificate",
    "verify_file",
]

log = logging.getLogger(__name__)

CERT_DIGITS = 30


def _as_pair(ratio) -> Tuple[Fraction, Fraction]:
    if isinstance(ratio, tuple):
        return Fraction(ratio[0]), Fraction(ratio[1])
    return endpoints(ratio)


def convergents_until(ratio, q_min: int) -> Tuple[int, int]:
    """First convergent ``p/q`` of ``ratio`` with ``q >= q_min``.

    ``ratio`` is an interval (or a ``(lo, hi)`` pair of rationals).  A partial
    quotient is accepted only if both endpoints agree on it, so the result
    holds for every real in the interval.  Degenerate intervals and
    quotients that the interval cannot resolve raise PrecisionExhausted.
    """
    lo, hi = _as_pair(ratio)
    if lo <= 0:
        raise DomainError("ratio must be positive")
    if lo >= hi:
        raise PrecisionExhausted("ratio interval is degenerate (rational input)")
    # x = num/den for both endpoints, Euclid on integers
    n_lo, d_lo = lo.numerator, lo.denominator
    n_hi, d_hi = hi.numerator, hi.denominator
    h1, h2 = 1, 0
    k1, k2 = 0, 1
    while True:
        b = n_lo // d_lo
        if n_hi // d_hi != b:
            raise PrecisionExhausted(f"partial quotient undetermined after q={k1}")
        h1, h2 = b * h1 + h2, h1
        k1, k2 = b * k1 + k2, k1
        if k1 >= q_min:
            return h1, k1
        r_lo, r_hi = n_lo - b * d_lo, n_hi - b * d_hi
        if r_lo == 0 or r_hi == 0:
            raise PrecisionExhausted("expansion of an endpoint terminated")
        # 1/(x - b) reverses the order of the endpoints
        n_lo, d_lo, n_hi, d_hi = d_hi, r_hi, d_lo, r_lo


def q_threshold(params: CubicParams) -> Tuple[int, Fraction]:
    """``(ceil(2 * upper_X), upper endpoint of upper_X)``."""
    ub = endpoints(upper_bound_X(params))[1]
    return math.ceil(2 * ub), ub


def initial_precision(q_min: int) -> int:
    return 2 * max(q_min - 1, 1).bit_length() + 96


def reduced_upper_bound(params: CubicParams, c_lower: Fraction, prec: int = 128) -> Fraction:
    """Upper endpoint of ``(2 / log a) log(2 a^(1/3) / (c log a))``.

    Smaller c only weakens the bound, so feeding a lower bound for c keeps
    the result an upper bound.
    """
    iv = ivcontext(prec)
    la = iv.log(iv.mpf(params.a))
    cube_root = iv.exp(la / 3)
    c = from_fraction(iv, c_lower)
    value = 2 / la * iv.log(2 * cube_root / (c * la))
    return endpoints(value)[1]


@dataclass(frozen=True)
class ReductionCertificate:
    params: CubicParams
    precision_used: int
    p: int
    q: int
    q_min: int
    upper_X: Fraction
    c_lower: Fraction
    new_upper_X: Fraction
    lower_X: Fraction

    @property
    def a(self) -> int:
        return self.params.a

    @property
    def contradiction(self) -> bool:
        return self.new_upper_X < self.lower_X

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "prec": self.precision_used,
            "p": str(self.p),
            "q": str(self.q),
            "q_min": str(self.q_min),
            "c_lo": decimal_down(self.c_lower, CERT_DIGITS),
            "new_upper": decimal_up(self.new_upper_X, CERT_DIGITS),
            "lower": decimal_down(self.lower_X, CERT_DIGITS),
            "contradiction": self.contradiction,
            "upper_X": decimal_up(self.upper_X, CERT_DIGITS),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ReductionCertificate":
        return cls(
            params=CubicParams(int(obj["a"])),
            precision_used=int(obj["prec"]),
            p=int(obj["p"]),
            q=int(obj["q"]),
            q_min=int(obj["q_min"]),
            upper_X=parse_decimal(obj["upper_X"]) if "upper_X" in obj else Fraction(0),
            c_lower=parse_decimal(obj["c_lo"]),
            new_upper_X=parse_decimal(obj["new_upper"]),
            lower_X=parse_decimal(obj["lower"]),
        )


def _linear_form_lower(p: int, q: int, lo: Fraction, hi: Fraction) -> Fraction:
    """min |p - q x| over x in [lo, hi]; zero if the interval hits p/q."""
    v1, v2 = p - q * lo, p - q * hi
    if (v1 > 0) != (v2 > 0) or v1 == 0 or v2 == 0:
        return Fraction(0)
    return min(abs(v1), abs(v2))


def reduce_parameter(
    params: CubicParams, precision: Optional[int] = None, precision_cap: int = PRECISION_CAP
) -> ReductionCertificate:
    """Certificate for one a > 100, retrying with doubled precision as needed."""
    if params.a <= 100:
        raise DomainError(f"reduction needs a > 100, got a={params.a}")
    q_min, ub = q_threshold(params)
    start = precision or initial_precision(q_min)
    lower_X = endpoints(lower_bound_X(params))[0]
    for prec in precision_ladder(start, precision_cap):
        ctx = build_context(params, prec)
        try:
            p, q = convergents_until(ctx.log_ratio, q_min)
        except PrecisionExhausted:
            continue
        lo, hi = endpoints(ctx.log_ratio)
        c = _linear_form_lower(p, q, lo, hi)
        if c <= 0:
            continue
        c_cert = parse_decimal(decimal_down(c, CERT_DIGITS))
        new_upper = reduced_upper_bound(params, c_cert, max(prec, 128))
        return ReductionCertificate(params, prec, p, q, q_min, ub, c_cert, new_upper, lower_X)
    raise PrecisionExhausted(f"a={params.a}: no certificate below {precision_cap} bits")


# --- sweeping -----------------------------------------------------------------


@dataclass
class SweepSummary:
    a_from: int
    a_to: int
    expected: int = 0
    certificates: int = 0
    contradictions: int = 0
    resumed: int = 0
    failures: Dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and self.contradictions == self.expected

    def to_json(self) -> dict:
        return {
            "from": self.a_from,
            "to": self.a_to,
            "expected": self.expected,
            "certificates": self.certificates,
            "contradictions": self.contradictions,
            "resumed": self.resumed,
            "failures": {str(a): msg for a, msg in sorted(self.failures.items())},
            "ok": self.ok,
        }


def _reduce_job(a: int, precision_cap: int = PRECISION_CAP) -> dict:
    try:
        return reduce_parameter(CubicParams(a), precision_cap=precision_cap).to_json()
    except Exception as exc:  # collected per a, never aborts the sweep
        return {"a": a, "error": f"{type(exc).__name__}: {exc}"}


def read_certificates(path: str) -> List[dict]:
    """Complete JSONL records of ``path``; a trailing partial line is ignored."""
    out = []
    if not os.path.exists(path):
        return out
    with open(path) as fh:
        for line in fh:
            if not line.endswith("\n"):
                break
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _trim_partial_line(path: str) -> None:
    with open(path, "rb+") as fh:
        data = fh.read()
        cut = data.rfind(b"\n") + 1
        if cut != len(data):
            fh.truncate(cut)


def sweep(
    a_from: int,
    a_to: int,
    jobs: int = 1,
    out: Optional[str] = None,
    a_values: Optional[Iterable[int]] = None,
    resume: bool = True,
    precision_cap: int = PRECISION_CAP,
) -> SweepSummary:
    """Reduce every a in ``[a_from, a_to]`` (or the given subset).

    Certificates are appended to ``out`` in increasing a.  With ``resume``,
    values of a already present in ``out`` are counted and skipped.
    """
    if not (100 < a_from <= a_to):
        raise DomainError(f"sweep range must satisfy 100 < from <= to, got [{a_from}, {a_to}]")
    values = list(range(a_from, a_to + 1)) if a_values is None else sorted(v for v in set(a_values) if a_from <= v <= a_to)
    summary = SweepSummary(a_from, a_to, expected=len(values))

    done: Set[int] = set()
    if out and resume and os.path.exists(out):
        _trim_partial_line(out)
        for rec in read_certificates(out):
            a = int(rec["a"])
            if a in values and a not in done:
                done.add(a)
                summary.certificates += 1
                summary.contradictions += bool(rec.get("contradiction"))
        summary.resumed = len(done)
    todo = [a for a in values if a not in done]

    job = partial(_reduce_job, precision_cap=precision_cap)
    sink = open(out, "a" if resume else "w") if out else None
    try:
        if jobs <= 1:
            results = map(job, todo)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=jobs)
            results = pool.map(job, todo, chunksize=max(1, min(256, len(todo) // (16 * jobs) or 1)))
        for rec in results:
            if "error" in rec:
                summary.failures[rec["a"]] = rec["error"]
                log.warning("a=%s failed: %s", rec["a"], rec["error"])
                continue
            summary.certificates += 1
            summary.contradictions += bool(rec["contradiction"])
            if not rec["contradiction"]:
                summary.failures[rec["a"]] = "no contradiction"
            if sink:
                sink.write(json.dumps(rec, sort_keys=False) + "\n")
                sink.flush()
        if pool:
            pool.shutdown()
    finally:
        if sink:
            sink.close()
    return summary


# --- replay -----------------------------------------------------------------


def _convergent_denominators(lo: Fraction, hi: Fraction, limit: int) -> List[Tuple[int, int]]:
    """Convergents (p_k, q_k) shared by every real in [lo, hi], up to q_k >= limit."""
    out = []
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    x_lo, x_hi = lo, hi
    while True:
        b_lo, b_hi = math.floor(x_lo), math.floor(x_hi)
        if b_lo != b_hi:
            return out
        p_prev, p_cur = p_cur, b_lo * p_cur + p_prev
        q_prev, q_cur = q_cur, b_lo * q_cur + q_prev
        out.append((p_cur, q_cur))
        if q_cur >= limit or x_lo == b_lo or x_hi == b_lo:
            return out
        x_lo, x_hi = 1 / (x_hi - b_lo), 1 / (x_lo - b_lo)


def verify_certificate(rec: dict) -> List[str]:
    """Problems found when replaying one certificate; empty means valid."""
    problems = []
    try:
        cert = ReductionCertificate.from_json(rec)
    except (KeyError, ValueError, TypeError, ArithmeticError) as exc:
        return [f"malformed record: {exc!r}"]
    a, p, q = cert.a, cert.p, cert.q
    if a <= 100:
        return [f"a={a} is outside the reduction range"]
    if math.gcd(p, q) != 1:
        problems.append("gcd(p, q) != 1")

    ub = endpoints(upper_bound_X(cert.params))[1]
    q_min = math.ceil(2 * ub)
    if q_min != cert.q_min:
        problems.append(f"q_min recomputes to {q_min}, recorded {cert.q_min}")
    if q < q_min:
        problems.append("q < q_min")

    ctx = build_context(cert.params, cert.precision_used)
    lo, hi = endpoints(ctx.log_ratio)
    convs = _convergent_denominators(lo, hi, q)
    if (p, q) not in convs:
        problems.append("p/q is not a certified convergent of the ratio")
    else:
        i = convs.index((p, q))
        if i > 0 and convs[i - 1][1] >= q_min:
            problems.append("an earlier convergent already satisfies q >= q_min")

    c = _linear_form_lower(p, q, lo, hi)
    if c <= 0:
        problems.append("|p - q ratio| not separated from 0")
    if c < cert.c_lower:
        problems.append("recorded c_lo exceeds the recomputed lower bound")
    if max(abs(p - q * lo), abs(p - q * hi)) * q >= 1:
        problems.append("|p/q - ratio| >= 1/q^2")

    new_upper = reduced_upper_bound(cert.params, cert.c_lower, max(cert.precision_used, 128))
    if new_upper > cert.new_upper_X:
        problems.append("recorded new_upper is below the recomputed bound")
    lower_X = endpoints(lower_bound_X(cert.params))[0]
    if lower_X < cert.lower_X:
        problems.append("recorded lower exceeds the recomputed lower bound")
    if not cert.new_upper_X < cert.lower_X:
        problems.append("bounds do not contradict")
    if rec.get("contradiction") is not True:
        problems.append("contradiction flag is not true")
    return problems


def verify_file(path: str) -> Tuple[int, Dict[int, List[str]]]:
    """Replay every certificate in a JSONL file: ``(count, {a: problems})``."""
    bad: Dict[int, List[str]] = {}
    n = 0
    seen = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            n += 1
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                bad[-lineno] = [f"line {lineno}: {exc}"]
                continue
            problems = verify_certificate(rec)
            a = rec.get("a", -lineno)
            if a in seen:
                problems.append("duplicate certificate")
            seen.add(a)
            if problems:
                bad[a] = problems
    return n, bad
