"""Independent reference implementations used only by the tests.

Nothing here imports cubic_units: elements are plain coefficient lists
reduced modulo the defining polynomial, norms are determinants of the
multiplication matrix, roots come from mpmath's polynomial solver.
"""

from fractions import Fraction
from itertools import product

import mpmath


def polymul(a, u, v):
    """Product of two coefficient lists modulo x^3 - a x^2 - (a+3) x - 1."""
    prod = [0] * 5
    for i, ui in enumerate(u):
        for j, vj in enumerate(v):
            prod[i + j] += ui * vj
    for d in (4, 3):
        c = prod[d]
        prod[d] = 0
        # x^d = x^(d-3) (a x^2 + (a+3) x + 1)
        prod[d - 1] += a * c
        prod[d - 2] += (a + 3) * c
        prod[d - 3] += c
    return prod[:3]


def polypow(a, u, k):
    out = [1, 0, 0]
    for _ in range(k):
        out = polymul(a, out, u)
    return out


def mult_matrix(a, u):
    cols = [polymul(a, u, e) for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def matrix_norm(a, u):
    return det3(mult_matrix(a, u))


def units_in_box(a, x_max):
    """``{(s, x, y): coords}`` for every +-eps^x delta^y with |x|, |y| <= x_max.

    Inverses come from solving the multiplication-matrix system exactly.
    """
    eps = [0, 1, 0]
    delta = [-a - 2, -a, 1]
    eps_inv = _inverse(a, eps)
    delta_inv = _inverse(a, delta)
    pos_e = [[1, 0, 0]]
    neg_e = [[1, 0, 0]]
    pos_d = [[1, 0, 0]]
    neg_d = [[1, 0, 0]]
    for _ in range(x_max):
        pos_e.append(polymul(a, pos_e[-1], eps))
        neg_e.append(polymul(a, neg_e[-1], eps_inv))
        pos_d.append(polymul(a, pos_d[-1], delta))
        neg_d.append(polymul(a, neg_d[-1], delta_inv))
    ep = lambda x: pos_e[x] if x >= 0 else neg_e[-x]
    dp = lambda y: pos_d[y] if y >= 0 else neg_d[-y]
    out = {}
    for x, y in product(range(-x_max, x_max + 1), repeat=2):
        c = polymul(a, ep(x), dp(y))
        out[(1, x, y)] = c
        out[(-1, x, y)] = [-v for v in c]
    return out


def _inverse(a, u):
    """Solve M v = e_0 with Cramer's rule; u must be a unit."""
    m = mult_matrix(a, u)
    d = det3(m)
    assert d in (1, -1), "not a unit"
    out = []
    for k in range(3):
        mk = [row[:] for row in m]
        for i in range(3):
            mk[i][k] = 1 if i == 0 else 0
        v = Fraction(det3(mk), d)
        assert v.denominator == 1
        out.append(int(v))
    assert polymul(a, u, out) == [1, 0, 0]
    return out


def double_box(a, x1_max, x2_max, n_max):
    """All (u1, u2, n) with u1 in the x1 box, u2 in the x2 box, 0 < |n| <= n_max.

    u1 + u2 is rational iff the rho and rho^2 coordinates cancel, which is
    checked by hashing those coordinates.
    """
    units1 = units_in_box(a, x1_max)
    units2 = units1 if x2_max == x1_max else units_in_box(a, x2_max)
    by_irr = {}
    for key, c in units2.items():
        by_irr.setdefault((c[1], c[2]), []).append((key, c[0]))
    sols = set()
    for k1, c in units1.items():
        for k2, c0 in by_irr.get((-c[1], -c[2]), ()):
            n = c[0] + c0
            if n and abs(n) <= n_max:
                sols.add((k1, k2, n))
    return sols


def u2_box_radius(a, x_max, n_max, dps=40):
    """An exponent radius containing every unit n - u1 with u1 in the box.

    |u2_i| <= n_max + |u1_i| at each embedding and the product of the
    three is 1, which bounds every log|u2_i| from both sides; the two
    exponents follow from a 2x2 solve on the first two embeddings.
    """
    with mpmath.workdps(dps):
        r1, r2, r3 = rho_roots(a, dps)
        le = [mpmath.log(abs(r)) for r in (r1, r2, r3)]
        ld = [mpmath.log(abs(1 + 1 / r)) for r in (r1, r2, r3)]  # delta = 1 + 1/rho
        logB = []
        for i in range(3):
            big = max(abs(le[i]) + abs(ld[i]), 0) * x_max
            logB.append(mpmath.log(n_max + mpmath.exp(big)))
        span = [max(logB[i], logB[(i + 1) % 3] + logB[(i + 2) % 3]) for i in range(3)]
        det = le[0] * ld[1] - le[1] * ld[0]
        rx = (abs(ld[1]) * span[0] + abs(ld[0]) * span[1]) / abs(det)
        ry = (abs(le[1]) * span[0] + abs(le[0]) * span[1]) / abs(det)
        return int(mpmath.ceil(max(rx, ry))) + 1


def rho_roots(a, dps=60):
    """The three real roots of the defining polynomial, decreasing."""
    with mpmath.workdps(dps):
        roots = mpmath.polyroots([1, -a, -(a + 3), -1], maxsteps=200, extraprec=4 * dps)
        return sorted((mpmath.re(r) for r in roots), reverse=True)


def best_approximation_denominators(x: Fraction, q_max: int):
    """Denominators q <= q_max where min_p |q x - p| hits a new record (brute force)."""
    out = []
    best = None
    for q in range(1, q_max + 1):
        p = round(q * x)
        err = abs(q * x - p)
        if best is None or err < best:
            best = err
            out.append((p, q))
    return out


def upper_bound_X(a, dps=50):
    with mpmath.workdps(dps):
        la = mpmath.log(a)
        return 343 * la * (10 + mpmath.mpf("1.7") * mpmath.log(la)) ** 2


def lower_bound_X(a, dps=50):
    with mpmath.workdps(dps):
        return (a + 2) * (mpmath.log(a + 1) - mpmath.log(2)) / 2


def laurent(D, logA1, logA2, b1, b2, dps=50):
    with mpmath.workdps(dps):
        la1, la2 = mpmath.mpf(logA1), mpmath.mpf(logA2)
        bp = mpmath.mpf(b1) / (D * la2) + mpmath.mpf(b2) / (D * la1)
        m = max(mpmath.log(bp) + mpmath.mpf("0.38"), mpmath.mpf(30) / D, 1)
        return -mpmath.mpf("17.9") * D**4 * m**2 * la1 * la2
