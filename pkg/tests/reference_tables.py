"""Reference tables in closed form, written out as functions of the irrep labels."""
from fractions import Fraction as F

from su3cg.exact import ExactReal


def S(x) -> ExactReal:
    return ExactReal.sqrt(F(x))


def adjoint_pair(s: int):
    """hw reduced CGs of both copies of (s,s) in (1,1) x (s,s); keys (nu1, 2J, n1, 2In)."""
    r1 = {
        (1, 2, 2 * s, s): ExactReal(F(1, 2)),
        (1, 0, 2 * s, s): S(3) / 2 * S(F(s, s + 2)),
        (2, 1, 2 * s - 1, s + 1): S(F(s + 2, 2 * (s + 1) * (s + 2))),
        (2, 1, 2 * s - 1, s - 1): -S(F(2 * s + 1, 2 * (s + 1) * (s + 2))),
    }
    r2 = {
        (1, 2, 2 * s, s): -S(3) / 2 * S(F(2 * s + 1, 2 * s + 3)),
        (1, 0, 2 * s, s): S(F(s * (2 * s + 1), (s + 2) * (2 * s + 3))) / 2,
        (2, 1, 2 * s - 1, s + 1): S(F(3 * (2 * s + 1), 2 * (s + 1) * (2 * s + 3))),
        (2, 1, 2 * s - 1, s - 1): S(F(3, 2 * (s + 1) * (s + 2) * (2 * s + 3))),
    }
    return r1, r2


def times_symmetric_two(p: int, q: int) -> dict:
    """hw reduced CGs of (p,q) x (2,0) for each target; keys (nu1, 2J, n1, 2In)."""
    P = p + q
    rows = {
        (p + 2, q): [((P, q, 2, 0), ExactReal(1))],
        (p, q + 1): [((P, q, 1, 1), S(F(p, p + 2))), ((P - 1, q + 1, 2, 0), -S(F(2, p + 2)))],
        (p - 2, q + 2): [
            ((P, q, 0, 2), S(F(p - 1, p + 1))),
            ((P - 1, q + 1, 1, 1), -S(F(2 * (p - 1), p * (p + 1)))),
            ((P - 2, q + 2, 2, 0), S(F(2, p * (p + 1)))),
        ],
        (p + 1, q - 1): [((P, q, 1, 1), S(F(P + 1, P + 3))), ((P - 1, q - 1, 2, 0), S(F(2, P + 3)))],
        (p - 1, q): [
            ((P, q, 0, 2), S(F(p * (P + 1), (p + 1) * (P + 2)))),
            ((P - 1, q + 1, 1, 1), -S(F(q * (P + 1), (1 + q) * (1 + p) * (P + 2)))),
            ((P - 1, q - 1, 1, 1), S(F(p * (q + 2), (1 + q) * (1 + p) * (P + 2)))),
            ((P - 2, q, 2, 0), -S(F(2, (1 + p) * (P + 2)))),
        ],
        (p, q - 2): [
            ((P, q, 0, 2), S(F(P, P + 2))),
            ((P - 1, q - 1, 1, 1), S(F(2 * P, (P + 1) * (P + 2)))),
            ((P - 2, q - 2, 2, 0), S(F(2, (P + 1) * (P + 2)))),
        ],
    }
    return {t: r for t, r in rows.items() if min(t) >= 0}


# <(lam,mu) nu2 nu1 nu3; I'| P12 |(lam,mu) nu1 nu2 nu3; I>, reference values
PERMUTATION_ELEMENTS = [
    ((1, 1), (1, 1, 1), 1, (1, 1, 1), 0, S(3) / 2),
    ((1, 1), (1, 1, 1), 1, (1, 1, 1), 1, ExactReal(F(-1, 2))),
    ((3, 3), (3, 4, 2), 2, (4, 3, 2), F(1, 2), ExactReal(F(-1, 2))),
    ((3, 3), (3, 4, 2), 2, (4, 3, 2), F(3, 2), -S(F(2, 5))),
    ((3, 3), (3, 4, 2), 2, (4, 3, 2), F(5, 2), S(F(7, 5)) / 2),
    ((3, 3), (3, 4, 2), 3, (4, 3, 2), F(1, 2), -S(F(7, 10))),
    ((3, 3), (3, 4, 2), 3, (4, 3, 2), F(3, 2), S(7) / 5),
    ((3, 3), (3, 4, 2), 3, (4, 3, 2), F(5, 2), 1 / (5 * S(2))),
]
