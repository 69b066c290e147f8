"""Closed forms for (lambda,0) x (0,lambda) -> (sigma,sigma).

Here the grade is lambda - sigma and every hw key is fixed by a single integer a:
left multiplet (lambda - a; a/2), right multiplet (sigma + a; (sigma + a)/2).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import NonexistentTarget, full_cg
from .exact import ExactReal, factorial, sqrt_factorials, to_twice
from .hw import CouplingQuery
from .rep import IrrepLabel, StateLabel, enumerate_states, su2_labels

__all__ = [
    "OutOfRange",
    "TensorOpCoeff",
    "hw_chain_closed_form",
    "reduced_cg_3f2",
    "hypergeometric_3f2",
    "tensor_operator_coeffs",
]


class OutOfRange(ValueError):
    pass


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def hw_chain_closed_form(lam: int, sigma: int, a: int) -> ExactReal:
    """Reduced hw coefficient at chain position a (0 <= a <= lambda - sigma)."""
    if sigma < 0 or sigma > lam:
        raise OutOfRange(f"need 0 <= sigma <= lambda, got sigma={sigma}, lambda={lam}")
    if a < 0 or a > lam - sigma:
        raise OutOfRange(f"a={a} outside 0..{lam - sigma}")
    return sqrt_factorials(
        num=(sigma + a + 1, lam - sigma, lam - a, 2 + 2 * sigma),
        den=(sigma + 1, lam - sigma - a, a, sigma, 2 + lam + sigma),
        coeff=_sgn(a),
    )


def _poch(x: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for j in range(n):
        out *= x + j
    return out


def hypergeometric_3f2(a1, a2, a3, b1, b2) -> Fraction:
    """Terminating 3F2(a1, a2, a3; b1, b2; 1) with at least one non-positive integer upper.

    The series stops at the first vanishing numerator; a vanishing denominator before
    that raises ZeroDivisionError.
    """
    ups = [Fraction(x) for x in (a1, a2, a3)]
    lows = [Fraction(x) for x in (b1, b2)]
    stops = [-int(x) for x in ups if x.denominator == 1 and x <= 0]
    if not stops:
        raise ValueError("series does not terminate")
    nmax = min(stops)
    total = Fraction(0)
    term = Fraction(1)
    for n in range(nmax + 1):
        total += term
        if n == nmax:
            break
        num = ups[0] + n
        num *= ups[1] + n
        num *= ups[2] + n
        den = (lows[0] + n) * (lows[1] + n) * (n + 1)
        if den == 0:
            raise ZeroDivisionError("lower parameter reaches zero before termination")
        term = term * num / den
    return total


def reduced_cg_3f2(lam: int, sigma: int, nu1p: int, p: int, I) -> ExactReal:
    """<(lambda,0) nu1'; (0,lambda) lambda+sigma-nu1'-p || (sigma,sigma) 2sigma-p; I> as a single sum."""
    tI = to_twice(I)
    if p < 0 or sigma < 0 or sigma > lam or tI not in su2_labels(IrrepLabel(sigma, sigma), 2 * sigma - p):
        raise NonexistentTarget(f"no multiplet 2sigma-p={2 * sigma - p}, 2I={tI} in ({sigma},{sigma})")
    if (sigma + p) % 2 != tI % 2:
        raise NonexistentTarget("parity of I and p do not match")
    n1 = lam + sigma - nu1p - p
    if not (0 <= nu1p <= lam) or not (0 <= n1 <= lam):
        return ExactReal()
    # twice-labels: s_m = (sigma - p)/2 and s_p = (sigma + p)/2 combine with I to integers
    Ih = Fraction(tI, 2)
    hm = Fraction(sigma - p, 2)
    hp = Fraction(sigma + p, 2)
    ints = [sigma - Ih + hm, sigma + Ih + hm + 1, lam - nu1p - Ih + hm, 1 + Ih + lam - nu1p + hm, hp - Ih, 1 + Ih + hp]
    if any(x.denominator != 1 for x in ints):
        raise NonexistentTarget("half-integral factorial arguments")
    A, B, C, D, E, F = (int(x) for x in ints)
    if min(A, B, C, D, E, F, nu1p + p - sigma) < 0:
        return ExactReal()
    pref = sqrt_factorials(
        num=(A, B, lam - sigma, nu1p + p - sigma, F),
        den=(2 + lam + sigma, nu1p, C, D, E),
        num_ints=(2 * sigma + 2,),
        coeff=Fraction(factorial(lam - nu1p), factorial(sigma)) * _sgn(lam),
    )
    total = Fraction(0)
    for nu1 in range(0, lam + 1):
        g = lam - Ih - nu1 + hp
        args = (nu1 - nu1p, p - nu1 + nu1p, nu1 - sigma, lam - nu1)
        if min(args) < 0 or g < 0:
            continue
        g = int(g)
        w = Fraction(factorial(g) * factorial(nu1), factorial(args[0]) * factorial(args[1]) * factorial(args[2]) * factorial(args[3]))
        f = hypergeometric_3f2(nu1 - lam, Ih + nu1p - lam + Fraction(p - sigma, 2), 1 + Ih + hm, nu1p - lam, Ih + nu1 - lam - hp)
        total += _sgn(nu1) * w * f
    return pref * total


@dataclass
class TensorOpCoeff:
    """Matrix of the (sigma,sigma) tensor operator component on (lambda,0) states."""

    lam: int
    sigma: int
    target: StateLabel
    matrix: dict  # (bra StateLabel of (lambda,0), ket StateLabel of (lambda,0)) -> ExactReal

    def __getitem__(self, key) -> ExactReal:
        return self.matrix.get(key, ExactReal())


def _dual_state(st: StateLabel) -> StateLabel:
    lam = st.irrep.mu
    return StateLabel(IrrepLabel(lam, 0), tuple(lam - x for x in st.nu), st.tI)


def tensor_operator_coeffs(lam: int, sigma: int, target: StateLabel) -> TensorOpCoeff:
    """Entries CG * (-1)^{n2} pairing |(lambda,0) nu'> with <(lambda,0) n| for each (0,lambda) state n."""
    if sigma > lam:
        raise OutOfRange("sigma must not exceed lambda")
    L, R, T = IrrepLabel(lam, 0), IrrepLabel(0, lam), IrrepLabel(sigma, sigma)
    q = CouplingQuery(L, R, T)
    out = {}
    for b in enumerate_states(L):
        for c in enumerate_states(R):
            if any(x + y != z + q.k for x, y, z in zip(b.nu, c.nu, target.nu)):
                continue
            v = full_cg(q, b, c, target)
            if not v.is_zero():
                out[(b, _dual_state(c))] = v * _sgn(c.nu[1])
    return TensorOpCoeff(lam, sigma, target, out)
