"""Row permutations of the oscillator basis and the relations they induce among CGs.

A permutation sigma of {1,2,3} acts by a+_{i,alpha} -> a+_{sigma(i),alpha}, so the
occupation of row i moves to row sigma(i).  Products compose as maps:
P_sigma P_tau = P_{sigma o tau}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .engine import ReducedCGTable, full_cg
from .exact import ExactReal
from .hw import CouplingQuery
from .rep import IrrepLabel, StateLabel, dimension, irrep, is_valid_state, su2_labels
from .wigner import sixj2

__all__ = [
    "Permutation",
    "S3",
    "NotApplicable",
    "sigma_of_k",
    "permutation_matrix_element",
    "weyl_relate",
    "interchange_order",
    "interchange_phase",
    "conjugate_relation",
    "conjugate_state",
    "permutation_column",
    "phase_variants_disagree",
    "weyl_evaluate",
]


class NotApplicable(ValueError):
    """The relation needs a (lambda,0) factor in a specific position."""


@dataclass(frozen=True)
class Permutation:
    """Images (sigma(1), sigma(2), sigma(3))."""

    images: tuple

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(self(other(i)) for i in (1, 2, 3)))

    def inverse(self) -> "Permutation":
        inv = [0, 0, 0]
        for i in (1, 2, 3):
            inv[self(i) - 1] = i
        return Permutation(tuple(inv))

    @property
    def is_odd(self) -> bool:
        a, b, c = self.images
        inversions = (a > b) + (a > c) + (b > c)
        return inversions % 2 == 1

    def act(self, nu) -> tuple:
        """Occupations after moving row i to row sigma(i)."""
        out = [0, 0, 0]
        for i in (1, 2, 3):
            out[self(i) - 1] = nu[i - 1]
        return tuple(out)

    @property
    def name(self) -> str:
        for k, v in S3.items():
            if v == self:
                return k
        return str(self.images)

    def __repr__(self):
        return f"Permutation({self.name})"


S3 = {
    "e": Permutation((1, 2, 3)),
    "P12": Permutation((2, 1, 3)),
    "P13": Permutation((3, 2, 1)),
    "P23": Permutation((1, 3, 2)),
    "P123": Permutation((2, 3, 1)),
    "P132": Permutation((3, 1, 2)),
}


def _perm(p) -> Permutation:
    return S3[p] if isinstance(p, str) else p


def sigma_of_k(perm, k: int) -> int:
    """Exponent of the determinant sign picked up by a grade-k product state."""
    return k if _perm(perm).is_odd else 0


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def _p12_phase_twice(nu, tI: int, tIp: int, lam: int, mu: int) -> int:
    return nu[2] - tI - tIp + 2 * mu - lam


def _p12_phase_alt_twice(nu, tI: int, tIp: int, lam: int, mu: int) -> int:
    # (nu3 - lam)/2 - (I + I') + mu, written on doubled labels
    return (nu[2] - lam) - (tI + tIp) + 2 * mu


def _p12(irr: IrrepLabel, nu, tI: int, tIp: int, variant: str) -> ExactReal:
    lam, mu = irr.lam, irr.mu
    n1, n2, n3 = nu
    f = _p12_phase_twice if variant == "standard" else _p12_phase_alt_twice
    ph = f(nu, tI, tIp, lam, mu)
    six = sixj2(n1, n3, tIp, n2, lam, tI)
    if six.is_zero():
        return six
    if ph % 2:
        raise AssertionError("half-integral phase in the 12 transposition")
    return six * ExactReal.sqrt((tI + 1) * (tIp + 1)) * _sgn(ph // 2)


def _p23(nu, tI: int, tIp: int) -> ExactReal:
    # swapping rows 2 and 3 swaps the two spins coupled to I
    if tI != tIp:
        return ExactReal()
    ph = nu[1] + nu[2] - tI
    return ExactReal(_sgn(ph // 2))


# Reduced words for each element, applied right to left.
_WORDS = {
    "e": (),
    "P12": ("P12",),
    "P23": ("P23",),
    "P13": ("P12", "P23", "P12"),
    "P123": ("P12", "P23"),
    "P132": ("P23", "P12"),
}


@lru_cache(maxsize=1 << 16)
def _column(irr: IrrepLabel, pname: str, nu: tuple, tI: int, variant: str) -> tuple:
    """P|nu; I> as ((tI', coefficient), ...) on occupations P.act(nu)."""
    if pname == "e":
        return ((tI, ExactReal(1)),)
    if pname in ("P12", "P23"):
        perm = S3[pname]
        nup = perm.act(nu)
        out = []
        for tIp in su2_labels(irr, nup[0]):
            if not is_valid_state(irr, nup, tIp):
                continue
            v = _p12(irr, nu, tI, tIp, variant) if pname == "P12" else _p23(nu, tI, tIp)
            if not v.is_zero():
                out.append((tIp, v))
        return tuple(out)
    word = _WORDS[pname]
    state = {tI: ExactReal(1)}
    cur = nu
    for g in reversed(word):
        nxt: dict = {}
        for t, c in state.items():
            for tp, v in _column(irr, g, cur, t, variant):
                nxt[tp] = nxt.get(tp, ExactReal()) + c * v
        cur = S3[g].act(cur)
        state = {t: v for t, v in nxt.items() if not v.is_zero()}
    return tuple(sorted(state.items(), reverse=True))


def permutation_matrix_element(irr, perm, bra: StateLabel, ket: StateLabel, *, variant: str = "standard") -> ExactReal:
    """<bra| P |ket>; zero unless bra occupations are P applied to ket occupations.

    ``variant="alt"`` evaluates the 12 transposition with the alternative phase display,
    for comparison only.
    """
    irr = irrep(irr)
    p = _perm(perm)
    if p.act(ket.nu) != tuple(bra.nu):
        return ExactReal()
    for t, v in _column(irr, p.name, tuple(ket.nu), ket.tI, variant):
        if t == bra.tI:
            return v
    return ExactReal()


def permutation_column(irr, perm, ket: StateLabel) -> list:
    """P|ket> as [(StateLabel, coefficient)]."""
    irr = irrep(irr)
    p = _perm(perm)
    nup = p.act(ket.nu)
    return [(StateLabel(irr, nup, t), v) for t, v in _column(irr, p.name, tuple(ket.nu), ket.tI, "standard")]


def phase_variants_disagree(irr) -> list:
    """States where the two written forms of the 12-transposition phase differ."""
    from .rep import enumerate_states

    irr = irrep(irr)
    bad = []
    for st in enumerate_states(irr):
        for t, v in _column(irr, "P12", st.nu, st.tI, "standard"):
            w = dict(_column(irr, "P12", st.nu, st.tI, "alt")).get(t, ExactReal())
            if v != w:
                bad.append((st, t))
    return bad


def weyl_relate(query: CouplingQuery, perm, bra1: StateLabel, bra2: StateLabel, target: StateLabel) -> list:
    """Expand <bra1; bra2 | target> through permuted states.

    Returns [(coefficient, (bra1', bra2', target'))] with
    CG = sum coefficient * CG(bra1', bra2', target').
    """
    p = _perm(perm)
    sign = _sgn(sigma_of_k(p, query.k))
    # <b|P^-1|b'> = <b'|P|b>, and <t'|P|t> directly
    col1 = permutation_column(query.left, p, bra1)
    col2 = permutation_column(query.right, p, bra2)
    colt = permutation_column(query.target, p, target)
    out = []
    for b1, c1 in col1:
        for b2, c2 in col2:
            for t, ct in colt:
                if not _su2_closes(b1.tI, b2.tI, t.tI):
                    continue
                out.append((c1 * c2 * ct * sign, (b1, b2, t)))
    return out


def _su2_closes(a: int, b: int, c: int) -> bool:
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def weyl_evaluate(query: CouplingQuery, perm, bra1: StateLabel, bra2: StateLabel, target: StateLabel) -> ExactReal:
    tot = ExactReal()
    for c, (b1, b2, t) in weyl_relate(query, perm, bra1, bra2, target):
        tot = tot + c * full_cg(query, b1, b2, t)
    return tot


# ---------------------------------------------------------------------------
# (lambda,0) interchange relations


def interchange_phase(p: int, tJp: int, tInp: int, tI: int, k: int, q1: int) -> int:
    """(-1)^(p + J' + I'_n + I - k + q1), doubled su(2) labels."""
    s = tJp + tInp + tI
    if s % 2:
        raise ValueError("su(2) labels do not close")
    return _sgn(p + s // 2 - k + q1)


def interchange_order(table: ReducedCGTable) -> ReducedCGTable:
    """Reduced table of (lambda,0) x (p1,q1) re-expressed for (p1,q1) x (lambda,0)."""
    q = table.query
    if q.left.mu != 0:
        raise NotApplicable(f"left factor {q.left} is not of the form (lambda,0)")
    T = q.target
    q1 = q.right.mu
    swapped = CouplingQuery(q.right, q.left, T, q.rho)
    out = {}
    for (n1p, tInp, nu1p, tJp, nb, tI), v in table.entries.items():
        p = T.lam + T.mu - nb
        out[(nu1p, tJp, n1p, tInp, nb, tI)] = v * interchange_phase(p, tJp, tInp, tI, table.k, q1)
    return ReducedCGTable(swapped, table.k, out)


def hw_interchange_sign(q: CouplingQuery) -> int:
    """epsilon = (-1)^(q2 - q1 + k) for (p1,q1) x (lambda,0) -> (p2,q2)."""
    return _sgn(q.target.mu - q.left.mu + q.k)


def conjugate_state(st: StateLabel) -> StateLabel:
    """(lambda,0) state n -> (0,lambda) state lambda - n with the same su(2) label."""
    if st.irrep.mu != 0:
        raise NotApplicable(f"{st.irrep} is not of the form (lambda,0)")
    lam = st.irrep.lam
    return StateLabel(IrrepLabel(0, lam), tuple(lam - x for x in st.nu), st.tI)


def conjugate_relation(query: CouplingQuery, bra1: StateLabel, bra2: StateLabel, target: StateLabel, value: ExactReal):
    """Map <bra1; bra2 | target> of (p1,q1) x (lambda,0) to (p2,q2) x (0,lambda) -> (p1,q1).

    Returns (new query, (target, conjugate bra2, bra1), value times the relation factor).
    """
    if query.right.mu != 0:
        raise NotApplicable(f"right factor {query.right} is not of the form (lambda,0)")
    L, R, T = query.left, query.right, query.target
    k = query.k
    new_q = CouplingQuery(T, R.conjugate(), L, query.rho)
    fac = ExactReal.sqrt(Fraction(dimension(L), dimension(T))) * _sgn(bra2.nu[1] + T.mu - L.mu + k)
    return new_q, (target, conjugate_state(bra2), bra1), value * fac
