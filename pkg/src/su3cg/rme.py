"""Reduced matrix elements of the su(2)+u(1) lowering tensors T^L and of the adjoint tensor.

Labels follow the layer picture: a state at u(1) label lam+mu-p sits p layers below the
highest weight.  ``p`` is an integer, ``tJ`` etc. are doubled su(2) labels.  Wigner-Eckart
convention:

    <J M_J | T^L_M | I M_I> = <I M_I; L M | J M_J> * rme(J <- I) / sqrt(2J+1)
"""
from __future__ import annotations

from functools import lru_cache

from .exact import ExactReal, sqrt_factorials, to_twice
from .rep import IrrepLabel, irrep
from .wigner import _CACHE, sixj2, triangle

__all__ = [
    "OutOfRange",
    "ZeroDenominator",
    "rme_from_hw",
    "rme_general",
    "rme_generator",
    "level_has",
    "LOWERING",
    "RAISING",
]

LOWERING = "lowering"
RAISING = "raising"


class OutOfRange(ValueError):
    """The requested multiplet does not exist in the irrep."""


class ZeroDenominator(ArithmeticError):
    """A reduced matrix element used as a divisor vanishes."""


def level_has(irr: IrrepLabel, p: int, tJ: int) -> bool:
    """True if the multiplet (nu1 = lam+mu-p, J) exists."""
    lam, mu = irr.lam, irr.mu
    if p < 0 or p > lam + mu or tJ < 0:
        return False
    if (mu + p - tJ) % 2 or tJ > mu + p or tJ < abs(mu - p):
        return False
    # the second triangle, (I, nu1/2, lam/2), with nu2+nu3 = mu+p
    return abs(lam + mu - p - lam) <= tJ <= 2 * lam + mu - p


@lru_cache(maxsize=_CACHE)
def _hw(lam: int, mu: int, p: int, tJ: int) -> ExactReal:
    irr = IrrepLabel(lam, mu)
    if not level_has(irr, p, tJ):
        raise OutOfRange(f"no multiplet nu1={lam + mu - p}, J={tJ}/2 in {irr}")
    a = (2 * lam - tJ + mu - p) // 2
    b = (2 * lam + tJ + mu - p) // 2 + 1
    if a < 0:
        raise OutOfRange(f"negative factorial in hw reduced matrix element ({irr}, p={p}, 2J={tJ})")
    sign = -1 if ((p - tJ + mu) // 2) % 2 else 1
    return sqrt_factorials(num=(lam + mu + 1, lam, p), den=(a, b), num_ints=(tJ + 1,), coeff=sign)


def rme2_from_hw(irr: IrrepLabel, p: int, tJ: int) -> ExactReal:
    return _hw(irr.lam, irr.mu, p, tJ)


def rme_from_hw(irr, p: int, J) -> ExactReal:
    """<lam+mu-p; J || T^{p/2} || lam+mu; mu/2> in closed form."""
    irr = irrep(irr)
    return _hw(irr.lam, irr.mu, int(p), to_twice(J))


@lru_cache(maxsize=_CACHE)
def _general(lam: int, mu: int, p: int, tk: int, tJ: int, tJp: int) -> ExactReal:
    irr = IrrepLabel(lam, mu)
    if not triangle(tJ, tk, tJp):
        return ExactReal()
    if tk == 0:
        if tJ != tJp:
            return ExactReal()
        if not level_has(irr, p, tJ):
            raise OutOfRange(f"no multiplet p={p}, 2J={tJ} in {irr}")
        return ExactReal.sqrt(tJ + 1)
    num = _hw(lam, mu, p + tk, tJp)
    den = _hw(lam, mu, p, tJ)
    if den.is_zero():
        raise ZeroDenominator(f"hw reduced matrix element vanishes at p={p}, 2J={tJ}")
    six = sixj2(tk, p, tk + p, mu, tJp, tJ)
    if six.is_zero() or num.is_zero():
        return ExactReal()
    ph = (mu + p + tk + tJp) // 2
    coeff = (-1 if ph % 2 else 1) * (tJ + 1)
    return six * ExactReal.sqrt(tk + p + 1) * (num / den) * coeff


def rme2_general(irr: IrrepLabel, p: int, tk: int, tJ: int, tJp: int) -> ExactReal:
    """Doubled-label form: <lam+mu-p-2k; J'|| T^k || lam+mu-p; J>, 2k = tk."""
    return _general(irr.lam, irr.mu, p, tk, tJ, tJp)


def rme_general(irr, p: int, k, J, Jp) -> ExactReal:
    """<lam+mu-p-2k; J' || T^k || lam+mu-p; J>."""
    irr = irrep(irr)
    return _general(irr.lam, irr.mu, int(p), to_twice(k), to_twice(J), to_twice(Jp))


def lowering2(irr: IrrepLabel, p: int, tI: int, tJ: int) -> ExactReal:
    """<lam+mu-(p+1); J || T^{1/2} || lam+mu-p; I>."""
    return _general(irr.lam, irr.mu, p, 1, tI, tJ)


def raising2(irr: IrrepLabel, p: int, tI: int, tJ: int) -> ExactReal:
    """<lam+mu-(p-1); J || Tbar^{1/2} || lam+mu-p; I>, from the adjoint relation."""
    val = _general(irr.lam, irr.mu, p - 1, 1, tJ, tI)
    ph = (tI + 1 - tJ) // 2
    return -val if ph % 2 else val


def rme_generator(irr, p: int, I, J, direction: str = LOWERING) -> ExactReal:
    """Reduced matrix element of the generator tensors.

    lowering: <lam+mu-(p+1); J || T^{1/2} || lam+mu-p; I>
    raising:  <lam+mu-(p-1); J || Tbar^{1/2} || lam+mu-p; I>
    """
    irr = irrep(irr)
    tI, tJ = to_twice(I), to_twice(J)
    if abs(tI - tJ) != 1:
        raise ValueError("generator tensors change the su(2) label by 1/2")
    if direction == LOWERING:
        return lowering2(irr, int(p), tI, tJ)
    if direction == RAISING:
        return raising2(irr, int(p), tI, tJ)
    raise ValueError(f"unknown direction {direction!r}")
