"""Exact su(2) Clebsch-Gordan coefficients, 6j and 9j symbols.

Condon-Shortley phases throughout.  The kernel functions prefixed with ``_``
take doubled integer arguments (``2j``, ``2m``) and are memoized; the public
wrappers accept anything :func:`su3cg.exact.to_twice` understands.

The 9j symbol is evaluated from the single sum over products of three 6j
symbols.  Only the six row/column triangle coefficients survive under the
square root, so the sum itself runs over rationals.
"""
from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache

from .exact import (
    ExactReal,
    MalformedHalfInt,
    factorial,
    factorial_exponents,
    int_exponents,
    radical_from_exponents,
    sqrt_factorials,
    to_twice,
)

__all__ = ["clebsch_gordan", "wigner_6j", "wigner_9j", "triangle", "cache_info", "cache_clear"]


def _cache_entries() -> int:
    mb = os.environ.get("SU3CG_CACHE_MB")
    if not mb:
        return 1 << 20
    # rough budget: ~500 bytes per memoized exact value
    return max(1024, int(float(mb) * 2000))


_CACHE = _cache_entries()


def triangle(ta: int, tb: int, tc: int) -> bool:
    """Triangle rule on doubled arguments, including integrality of a+b+c."""
    return (
        ta >= 0
        and tb >= 0
        and tc >= 0
        and abs(ta - tb) <= tc <= ta + tb
        and (ta + tb + tc) % 2 == 0
    )


def _delta_exponents(ta: int, tb: int, tc: int, exps: dict, sign: int = 1) -> None:
    """Accumulate the prime exponents of (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!."""
    for n, s in (
        ((ta + tb - tc) // 2, sign),
        ((ta - tb + tc) // 2, sign),
        ((-ta + tb + tc) // 2, sign),
        ((ta + tb + tc) // 2 + 1, -sign),
    ):
        for p, e in factorial_exponents(n):
            exps[p] = exps.get(p, 0) + s * e


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    return Fraction(
        factorial((ta + tb - tc) // 2) * factorial((ta - tb + tc) // 2) * factorial((-ta + tb + tc) // 2),
        factorial((ta + tb + tc) // 2 + 1),
    )


# ---------------------------------------------------------------------------
# Clebsch-Gordan


@lru_cache(maxsize=_CACHE)
def _cg(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> ExactReal:
    if tm1 + tm2 != tM or not triangle(tj1, tj2, tJ):
        return ExactReal()
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tJ:
        return ExactReal()
    a = (tj1 + tj2 - tJ) // 2
    j1mm1 = (tj1 - tm1) // 2
    j2pm2 = (tj2 + tm2) // 2
    s1 = (tJ - tj2 + tm1) // 2
    s2 = (tJ - tj1 - tm2) // 2
    lo = max(0, -s1, -s2)
    hi = min(a, j1mm1, j2pm2)
    total = Fraction(0)
    for z in range(lo, hi + 1):
        den = (
            factorial(z)
            * factorial(a - z)
            * factorial(j1mm1 - z)
            * factorial(j2pm2 - z)
            * factorial(s1 + z)
            * factorial(s2 + z)
        )
        total += Fraction(-1 if z & 1 else 1, den)
    if not total:
        return ExactReal()
    return sqrt_factorials(
        num=(
            a,
            (tj1 - tj2 + tJ) // 2,
            (-tj1 + tj2 + tJ) // 2,
            (tj1 + tm1) // 2,
            j1mm1,
            j2pm2,
            (tj2 - tm2) // 2,
            (tJ + tM) // 2,
            (tJ - tM) // 2,
        ),
        den=((tj1 + tj2 + tJ) // 2 + 1,),
        num_ints=(tJ + 1,),
        coeff=total,
    )


def _check_projection(tj: int, tm: int) -> None:
    if tj < 0 or (tj + tm) % 2:
        raise MalformedHalfInt(f"j={tj}/2, m={tm}/2: j+m must be integral and j >= 0")


def clebsch_gordan(j1, m1, j2, m2, J, M) -> ExactReal:
    """<j1 m1; j2 m2 | J M> with Condon-Shortley phases."""
    t = [to_twice(x) for x in (j1, m1, j2, m2, J, M)]
    for tj, tm in ((t[0], t[1]), (t[2], t[3]), (t[4], t[5])):
        _check_projection(tj, tm)
    return _cg(*t)


def cg2(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> ExactReal:
    """Doubled-argument Clebsch-Gordan coefficient, no validation."""
    return _cg(tj1, tm1, tj2, tm2, tJ, tM)


# ---------------------------------------------------------------------------
# 6j


def _racah_sum(t1: int, t2: int, t3: int, t4: int, t5: int, t6: int) -> Fraction:
    """Racah's single sum for {j1 j2 j3; j4 j5 j6}, triangle factors excluded."""
    a1 = (t1 + t2 + t3) // 2
    a2 = (t1 + t5 + t6) // 2
    a3 = (t4 + t2 + t6) // 2
    a4 = (t4 + t5 + t3) // 2
    b1 = (t1 + t2 + t4 + t5) // 2
    b2 = (t2 + t3 + t5 + t6) // 2
    b3 = (t3 + t1 + t6 + t4) // 2
    lo = max(a1, a2, a3, a4)
    hi = min(b1, b2, b3)
    total = Fraction(0)
    for z in range(lo, hi + 1):
        den = (
            factorial(z - a1)
            * factorial(z - a2)
            * factorial(z - a3)
            * factorial(z - a4)
            * factorial(b1 - z)
            * factorial(b2 - z)
            * factorial(b3 - z)
        )
        total += Fraction(-factorial(z + 1) if z & 1 else factorial(z + 1), den)
    return total


def _sixj_key(t: tuple[int, ...]) -> tuple[int, ...]:
    cols = sorted(((t[0], t[3]), (t[1], t[4]), (t[2], t[5])))
    return (cols[0][0], cols[1][0], cols[2][0], cols[0][1], cols[1][1], cols[2][1])


def _sixj_admissible(t1, t2, t3, t4, t5, t6) -> bool:
    return triangle(t1, t2, t3) and triangle(t1, t5, t6) and triangle(t4, t2, t6) and triangle(t4, t5, t3)


@lru_cache(maxsize=_CACHE)
def _sixj_sorted(t1: int, t2: int, t3: int, t4: int, t5: int, t6: int) -> ExactReal:
    if not _sixj_admissible(t1, t2, t3, t4, t5, t6):
        return ExactReal()
    total = _racah_sum(t1, t2, t3, t4, t5, t6)
    if not total:
        return ExactReal()
    exps: dict[int, int] = {}
    _delta_exponents(t1, t2, t3, exps)
    _delta_exponents(t1, t5, t6, exps)
    _delta_exponents(t4, t2, t6, exps)
    _delta_exponents(t4, t5, t3, exps)
    return radical_from_exponents(exps, total)


def sixj2(t1: int, t2: int, t3: int, t4: int, t5: int, t6: int) -> ExactReal:
    """Doubled-argument 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _sixj_sorted(*_sixj_key((t1, t2, t3, t4, t5, t6)))


def sixj2_uncached(t1: int, t2: int, t3: int, t4: int, t5: int, t6: int) -> ExactReal:
    return _sixj_sorted.__wrapped__(t1, t2, t3, t4, t5, t6)


def wigner_6j(j1, j2, j3, j4, j5, j6) -> ExactReal:
    """The 6j symbol {j1 j2 j3; j4 j5 j6}; zero unless all four triads close."""
    t = [to_twice(x) for x in (j1, j2, j3, j4, j5, j6)]
    if any(x < 0 for x in t):
        raise MalformedHalfInt("6j arguments must be non-negative")
    return sixj2(*t)


# ---------------------------------------------------------------------------
# 9j


@lru_cache(maxsize=_CACHE)
def _ninej(ta: int, tb: int, tc: int, td: int, te: int, tf: int, tg: int, th: int, ti: int) -> ExactReal:
    if not (
        triangle(ta, tb, tc)
        and triangle(td, te, tf)
        and triangle(tg, th, ti)
        and triangle(ta, td, tg)
        and triangle(tb, te, th)
        and triangle(tc, tf, ti)
    ):
        return ExactReal()
    lo = max(abs(ta - ti), abs(tb - tf), abs(td - th))
    hi = min(ta + ti, tb + tf, td + th)
    if (ta + ti - lo) % 2:
        lo += 1
    total = Fraction(0)
    for tx in range(lo, hi + 1, 2):
        if not (triangle(ta, ti, tx) and triangle(tb, tf, tx) and triangle(td, th, tx)):
            continue
        r1 = _racah_sum(ta, tb, tc, tf, ti, tx)
        if not r1:
            continue
        r2 = _racah_sum(td, te, tf, tb, tx, th)
        if not r2:
            continue
        r3 = _racah_sum(tg, th, ti, tx, ta, td)
        if not r3:
            continue
        weight = _delta_sq(ta, ti, tx) * _delta_sq(tb, tf, tx) * _delta_sq(td, th, tx)
        term = (tx + 1) * weight * r1 * r2 * r3
        total += -term if tx & 1 else term
    if not total:
        return ExactReal()
    exps: dict[int, int] = {}
    _delta_exponents(ta, tb, tc, exps)
    _delta_exponents(td, te, tf, exps)
    _delta_exponents(tg, th, ti, exps)
    _delta_exponents(ta, td, tg, exps)
    _delta_exponents(tb, te, th, exps)
    _delta_exponents(tc, tf, ti, exps)
    return radical_from_exponents(exps, total)


def ninej2(*t: int) -> ExactReal:
    """Doubled-argument 9j symbol, rows given in order."""
    return _ninej(*t)


def ninej2_by_6j(ta, tb, tc, td, te, tf, tg, th, ti) -> ExactReal:
    """9j assembled from full 6j values, uncached; used to cross-check the rational-sum path."""
    lo = max(abs(ta - ti), abs(tb - tf), abs(td - th))
    hi = min(ta + ti, tb + tf, td + th)
    total = ExactReal()
    for tx in range(lo, hi + 1):
        if (ta + ti + tx) % 2:
            continue
        term = (
            sixj2_uncached(ta, tb, tc, tf, ti, tx)
            * sixj2_uncached(td, te, tf, tb, tx, th)
            * sixj2_uncached(tg, th, ti, tx, ta, td)
        )
        total = total + term * ((-1 if tx & 1 else 1) * (tx + 1))
    return total


def wigner_9j(*args) -> ExactReal:
    """The 9j symbol with rows (j1 j2 j3), (j4 j5 j6), (j7 j8 j9).

    Accepts nine arguments or a single 3x3 nested sequence.
    """
    if len(args) == 1:
        args = tuple(x for row in args[0] for x in row)
    if len(args) != 9:
        raise TypeError("wigner_9j takes nine arguments")
    t = [to_twice(x) for x in args]
    if any(x < 0 for x in t):
        raise MalformedHalfInt("9j arguments must be non-negative")
    return _ninej(*t)


def cache_info() -> dict:
    return {
        "cg": _cg.cache_info()._asdict(),
        "6j": _sixj_sorted.cache_info()._asdict(),
        "9j": _ninej.cache_info()._asdict(),
    }


def cache_clear() -> None:
    _cg.cache_clear()
    _sixj_sorted.cache_clear()
    _ninej.cache_clear()
