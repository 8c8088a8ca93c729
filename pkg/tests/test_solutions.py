import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubic_units.cubic_core import CubicParams, OrderElement, UnitRepr, exponents_from_unit
from cubic_units.embeddings import build_context
from cubic_units.errors import DomainError, VerificationFailed
from cubic_units.intervals import lower, upper
from cubic_units.solutions import (
    SolutionTriple,
    canonical_key,
    canonicalize,
    classify,
    galois_choice,
    good_representative,
    is_trivial,
    orbit,
)


def unit(a, *c):
    p = CubicParams(a)
    return exponents_from_unit(OrderElement(*c, p))


def triple(a, c1, c2, n):
    return SolutionTriple(unit(a, *c1), unit(a, *c2), n).check()


def test_check_rejects_non_solution():
    p = CubicParams(0)
    bad = SolutionTriple(UnitRepr(1, 1, 0, p), UnitRepr(1, 0, 0, p), 1)
    assert not bad.is_solution()
    with pytest.raises(VerificationFailed):
        bad.check()


def test_orbit_of_one_one_two():
    p = CubicParams(4)
    one = UnitRepr(1, 0, 0, p)
    orb = orbit(SolutionTriple(one, one, 2))
    assert len(orb) == 2
    assert SolutionTriple(-one, -one, -2) in orb


@pytest.mark.parametrize("a", [-1, 0, 3, 1000])
def test_orbit_of_rho_family_has_twelve_members(a):
    sol = triple(a, (1, 1, 0), (0, -1, 0), 1)
    orb = orbit(sol)
    assert len(orb) == 12
    assert all(m.is_solution() for m in orb)


def test_table_row_orbit_contains_swap():
    sol = triple(-1, (-1, -1, 0), (2, 1, 0), 1)
    orb = orbit(sol)
    assert len(orb) == 12
    assert triple(-1, (2, 1, 0), (-1, -1, 0), 1) in orb


def test_canonicalize_prefers_positive_n():
    p = CubicParams(7)
    m = UnitRepr(-1, 0, 0, p)
    c = canonicalize(SolutionTriple(m, m, -2))
    assert c.n == 2 and c.u1 == UnitRepr(1, 0, 0, p)


def test_canonical_form_is_galois_invariant():
    sol = triple(0, (6, 1, -2), (-5, -1, 2), 1)
    assert canonicalize(sol) == canonicalize(sol.sigma())
    assert canonicalize(sol) == canonicalize(sol.sigma(2).swap().negate())


@settings(max_examples=100, deadline=None)
@given(a=st.integers(-1, 500), s=st.sampled_from([1, -1]), x=st.integers(-6, 6), y=st.integers(-6, 6))
def test_orbit_closed_and_canonical_consistent(a, s, x, y):
    # (u, -u, 0) triples exist for every unit, so the orbit machinery can be
    # exercised on arbitrary exponents
    p = CubicParams(a)
    u = UnitRepr(s, x, y, p)
    sol = SolutionTriple(u, -u, 0)
    orb = orbit(sol)
    assert len(orb) in (1, 2, 3, 4, 6, 12)
    key = canonical_key(canonicalize(sol))
    for m in orb:
        assert canonical_key(canonicalize(m)) == key
        assert m.negate() in orb and m.swap() in orb and m.sigma() in orb


def test_trivial_families():
    p = CubicParams(5)
    u = UnitRepr(1, 3, -2, p)
    assert is_trivial(SolutionTriple(u, -u, 0)).family == "(u,-u,0)"
    assert is_trivial(triple(5, (1, 1, 0), (0, -1, 0), 1)).family == "(rho+1,-rho,1)"
    one = UnitRepr(1, 0, 0, p)
    assert is_trivial(SolutionTriple(one, one, 2)).family == "(1,1,2)"
    assert is_trivial(SolutionTriple(one, one, 2).sigma().negate())
    assert not is_trivial(triple(0, (6, 1, -2), (-5, -1, 2), 1))
    assert classify(triple(0, (6, 1, -2), (-5, -1, 2), 1)).family is None


def test_json_roundtrip():
    sol = triple(-1, (1234, -305, -549), (-1233, 305, 549), 1)
    obj = sol.to_json()
    assert obj["u1"]["c"] == ["1234", "-305", "-549"]
    assert SolutionTriple.from_json(obj) == sol
    obj["u1"]["c"][0] = "1235"
    with pytest.raises(VerificationFailed):
        SolutionTriple.from_json(obj)


# --- Galois choice and the good representative ------------------------------


@pytest.mark.parametrize(
    "x2,y2,X,case,k",
    [
        (7, 3, 7, "1", 0),
        (7, -7, 7, "1", 0),
        (-6, -3, 6, "2.1", 2),
        (-6, 2, 6, "2.1", 2),
        (-6, -4, 6, "2.2", 1),
        (3, 6, 6, "3.1", 0),
        (2, 6, 6, "3.2", 2),
        (1, -5, 5, "4", 1),
    ],
)
def test_galois_choice_cases(x2, y2, X, case, k):
    assert galois_choice(x2, y2, X) == (case, k)


def test_galois_choice_examples_from_root_estimates():
    p = CubicParams(200)
    # X = -x2 with y2 >= -X/2: sigma^2 maps (x2, y2) to (-x2 + y2, -x2)
    u = UnitRepr(1, -6, -2, p)
    assert (u.sigma(2).x, u.sigma(2).y) == (6 - 2, 6)
    # X = -y2: sigma maps (x2, y2) to (-y2, -y2 + x2)
    u = UnitRepr(1, 2, -6, p)
    assert (u.sigma().x, u.sigma().y) == (6, 6 + 2)


def test_galois_choice_rejects_inconsistent_X():
    with pytest.raises(DomainError):
        galois_choice(1, 2, 5)
    with pytest.raises(DomainError):
        galois_choice(0, 0, 0)


def _pseudo(a, rng, X_max=30):
    p = CubicParams(a)
    while True:
        e = [(rng.choice((1, -1)), rng.randint(-X_max, X_max), rng.randint(-X_max, X_max)) for _ in range(2)]
        if max(abs(v) for s, x, y in e for v in (x, y)) >= 1:
            return SolutionTriple(UnitRepr(*e[0], p), UnitRepr(*e[1], p), 1)


def test_good_representative_random_small_sample():
    rng = random.Random(4242)
    for _ in range(60):
        a = rng.randint(101, 10**4)
        sol = _pseudo(a, rng)
        X = sol.max_exponent
        out = good_representative(sol)
        assert out in orbit(sol)
        assert out.u1.sign == 1
        ctx = build_context(CubicParams(a), 256)
        lhs = ctx.signed_log_abs(out.u2.element, 1)
        assert lower(lhs) > upper(ctx.log_a() * X / 2)


def test_good_representative_on_trivial_solution():
    sol = triple(500, (1, 1, 0), (0, -1, 0), 1)
    out = good_representative(sol)
    assert out.is_solution() and out.u1.sign == 1


def test_good_representative_domain():
    with pytest.raises(DomainError):
        good_representative(triple(5, (1, 1, 0), (0, -1, 0), 1))
    p = CubicParams(500)
    one = UnitRepr(1, 0, 0, p)
    with pytest.raises(DomainError):
        good_representative(SolutionTriple(one, one, 2))
