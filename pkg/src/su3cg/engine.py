"""Reduced and full coupling coefficients for every state of the target irrep.

Each target state is the target hw lowered by T^{p/2}; pushing the lowering through the
coupled product splits it between the two factors, and the resulting recoupling is a 9j
symbol.  Lowering by d quanta on the left and p-d on the right carries a binomial weight.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from .exact import ExactReal, to_twice
from .hw import CouplingQuery, HwVector, solve_hw
from .rep import IrrepLabel, StateLabel, enumerate_states, irrep, su2_labels
from .rme import OutOfRange, rme2_from_hw, rme2_general
from .wigner import cg2, ninej2, triangle

__all__ = [
    "NonexistentTarget",
    "WeightMismatch",
    "ReducedCGTable",
    "FullCG",
    "reduced_cg",
    "reduced_cg_all",
    "full_cg",
    "couple",
    "bra_keys",
]


class NonexistentTarget(ValueError):
    """The requested target multiplet does not exist in the target irrep."""


class WeightMismatch(ValueError):
    """Bra weights do not add up to the target weight."""


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


@dataclass
class ReducedCGTable:
    """Entries keyed by (nu1', 2J', n1', 2I'_n, target nu1, 2I)."""

    query: CouplingQuery
    k: int
    entries: dict

    def slice(self, nu1bar: int, tI: int) -> dict:
        return {key[:4]: v for key, v in self.entries.items() if key[4] == nu1bar and key[5] == tI}

    def multiplets(self) -> list:
        return sorted({key[4:] for key in self.entries}, reverse=True)

    def row_norm2(self, nu1bar: int, tI: int) -> ExactReal:
        tot = ExactReal()
        for v in self.slice(nu1bar, tI).values():
            tot = tot + v * v
        return tot

    def __getitem__(self, key) -> ExactReal:
        return self.entries.get(key, ExactReal())

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class FullCG:
    bra1: StateLabel
    bra2: StateLabel
    target: StateLabel
    rho: int
    value: ExactReal


def _target_p(target: IrrepLabel, nu1bar: int, tI: int) -> int:
    p = target.lam + target.mu - nu1bar
    if p < 0 or tI not in su2_labels(target, nu1bar):
        raise NonexistentTarget(f"no multiplet nu1={nu1bar}, 2I={tI} in {target}")
    return p


def bra_keys(q: CouplingQuery, nu1bar: int) -> list:
    """Product multiplets (nu1', 2J', n1', 2I'_n) at the target level nu1bar."""
    L, R = q.left, q.right
    total = nu1bar + q.k
    out = []
    for nu1p in range(min(L.lam + L.mu, total), -1, -1):
        n1p = total - nu1p
        if n1p > R.lam + R.mu:
            break
        for tJp in su2_labels(L, nu1p):
            for tInp in su2_labels(R, n1p):
                out.append((nu1p, tJp, n1p, tInp))
    return out


def _reduced(hw: HwVector, bra: tuple, p: int, tI: int, hw_den: ExactReal) -> ExactReal:
    q = hw.query
    L, R, q2 = q.left, q.right, q.target.mu
    nu1p, tJp, n1p, tInp = bra
    if not triangle(tJp, tInp, tI):
        return ExactReal()
    ph = 2 * p - tI - tJp - tInp
    if ph % 2:
        return ExactReal()
    Lt, Rt = L.lam + L.mu, R.lam + R.mu
    tot = ExactReal()
    for (nu1, tJ, n1, tIn), h in hw.entries.items():
        if h.is_zero():
            continue
        d = nu1 - nu1p
        if d < 0 or d > p or n1 - n1p != p - d:
            continue
        nj = ninej2(tIn, tJ, q2, p - d, d, p, tInp, tJp, tI)
        if nj.is_zero():
            continue
        try:
            r1 = rme2_general(L, Lt - nu1, d, tJ, tJp)
            if r1.is_zero():
                continue
            r2 = rme2_general(R, Rt - n1, p - d, tIn, tInp)
        except OutOfRange:
            continue
        if r2.is_zero():
            continue
        tot = tot + h * r1 * r2 * nj * (comb(p, d) * _sgn((q2 + tJ + tIn) // 2))
    if tot.is_zero():
        return tot
    return tot * ExactReal.sqrt((tI + 1) * (q2 + 1) * (p + 1)) * _sgn(ph // 2) / hw_den


def reduced_cg(hw: HwVector, bra: tuple, target_nu1: int, target_I) -> ExactReal:
    """One reduced coefficient <bra || target multiplet>."""
    tI = to_twice(target_I)
    T = hw.query.target
    p = _target_p(T, target_nu1, tI)
    return _reduced(hw, tuple(bra), p, tI, rme2_from_hw(T, p, tI))


def reduced_cg_all(hw: HwVector, target_nu1: int, target_I) -> ReducedCGTable:
    """Every reduced coefficient feeding the target multiplet (target_nu1, target_I)."""
    tI = to_twice(target_I)
    q = hw.query
    p = _target_p(q.target, target_nu1, tI)
    den = rme2_from_hw(q.target, p, tI)
    entries = {}
    for bra in bra_keys(q, target_nu1):
        if triangle(bra[1], bra[3], tI):
            entries[bra + (target_nu1, tI)] = _reduced(hw, bra, p, tI, den)
    return ReducedCGTable(q, hw.k, entries)


def _hw_for(query: CouplingQuery) -> HwVector:
    res = solve_hw(query)
    if isinstance(res, list):
        raise ValueError(f"{query.target} occurs {len(res)} times; pass rho")
    return res


def full_cg(query: CouplingQuery, bra1: StateLabel, bra2: StateLabel, target: StateLabel, *, strict: bool = False) -> ExactReal:
    """<bra1; bra2 | target>_rho as reduced coefficient times an su(2) CG.

    Mismatched weights give zero, or raise WeightMismatch with ``strict``.
    """
    k = query.k
    if any(b + c != t + k for b, c, t in zip(bra1.nu, bra2.nu, target.nu)):
        if strict:
            raise WeightMismatch(f"{bra1} x {bra2} cannot reach {target} at grade {k}")
        return ExactReal()
    for lab, irr in ((bra1, query.left), (bra2, query.right), (target, query.target)):
        if lab.irrep != irr or not lab.is_valid():
            raise NonexistentTarget(f"{lab} is not a state of {irr}")
    c = cg2(bra1.tI, bra1.tM, bra2.tI, bra2.tM, target.tI, target.tM)
    if c.is_zero():
        return c
    hw = _hw_for(query)
    r = reduced_cg(hw, (bra1.nu[0], bra1.tI, bra2.nu[0], bra2.tI), target.nu[0], target.I)
    return r * c


def couple(query: CouplingQuery, hw: HwVector | None = None):
    """Complete reduced table plus an iterator over every nonzero full CG."""
    hw = hw or _hw_for(query)
    q = hw.query
    entries = {}
    for t in enumerate_states(q.target):
        if t.tM != t.tI:
            continue
        entries.update(reduced_cg_all(hw, t.nu[0], t.I).entries)
    table = ReducedCGTable(q, hw.k, entries)
    return table, _iter_full(q, table)


def _iter_full(q: CouplingQuery, table: ReducedCGTable) -> Iterator[FullCG]:
    k = q.k
    bs, cs = enumerate_states(q.left), enumerate_states(q.right)
    by_key: dict = {}
    for b in bs:
        for c in cs:
            by_key.setdefault((b.nu[0], b.tI, c.nu[0], c.tI), []).append((b, c))
    for t in enumerate_states(q.target):
        for (nu1p, tJp, n1p, tInp, nb, tb), r in table.entries.items():
            if nb != t.nu[0] or tb != t.tI or r.is_zero():
                continue
            for b, c in by_key.get((nu1p, tJp, n1p, tInp), ()):
                if any(x + y != z + k for x, y, z in zip(b.nu, c.nu, t.nu)):
                    continue
                v = cg2(b.tI, b.tM, c.tI, c.tM, t.tI, t.tM)
                if not v.is_zero():
                    yield FullCG(b, c, t, q.rho or 1, r * v)


def couple_query(left, right, target, rho=None) -> CouplingQuery:
    return CouplingQuery.make(left, right, target, rho)
