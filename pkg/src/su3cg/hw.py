"""Reduced coupling coefficients of the target highest-weight state.

A key ``(nu1, tJ, n1, tIn)`` labels the left-factor multiplet (u(1) label nu1, doubled
su(2) label tJ) and the right-factor multiplet (n1, tIn) that couple to the target hw.
Occupation balance fixes n1 = p2 + q2 + k - nu1.

Two sweeps are available.  ``"lower-left"`` walks nu1 downward and produces each key from
keys one left-layer higher; ``"lower-right"`` walks n1 downward instead.  Keys the sweep
cannot reach become free parameters, fixed afterwards by the remaining equations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .exact import ExactReal
from .rep import IrrepLabel, NotInProduct, decompose_product, grade, irrep, su2_labels
from .rme import OutOfRange, lowering2, raising2
from .wigner import cg2, sixj2, triangle

__all__ = [
    "CouplingQuery",
    "HwVector",
    "MissingSource",
    "ZeroDenominator",
    "ConventionUnavailable",
    "GradeNotZero",
    "NonRationalNorm",
    "hw_keys",
    "recursion_step",
    "solve_hw",
    "solve_hw_all",
    "hw_k0_closed_form",
    "hw_lambda0_chains",
    "annihilation_residual",
]


class MissingSource(KeyError):
    """A recursion source key has not been computed yet."""


class ZeroDenominator(ArithmeticError):
    """The recursion cannot produce this key; use the other direction."""


class ConventionUnavailable(ValueError):
    """No fixed convention separates the copies of this target."""


class GradeNotZero(ValueError):
    pass


class NonRationalNorm(ArithmeticError):
    """Squared norm is not rational, so normalization leaves the exact domain."""


@dataclass(frozen=True)
class CouplingQuery:
    left: IrrepLabel
    right: IrrepLabel
    target: IrrepLabel
    rho: int | None = None

    @classmethod
    def make(cls, left, right, target, rho=None) -> "CouplingQuery":
        return cls(irrep(left), irrep(right), irrep(target), rho)

    @property
    def k(self) -> int:
        return grade(self.left, self.right, self.target)

    @property
    def multiplicity(self) -> int:
        return decompose_product(self.left, self.right).multiplicity(self.target)

    @property
    def level_sum(self) -> int:
        """nu1 + n1 shared by every hw key."""
        return self.target.lam + self.target.mu + self.k


Key = tuple  # (nu1, tJ, n1, tIn)


@dataclass
class HwVector:
    query: CouplingQuery
    entries: dict
    k: int
    rho: int = 1
    convention: str = "hw-sign"

    def __getitem__(self, key) -> ExactReal:
        return self.entries.get(key, ExactReal())

    def norm2(self) -> ExactReal:
        total = ExactReal()
        for v in self.entries.values():
            total = total + v * v
        return total

    def items(self):
        return sorted(self.entries.items(), reverse=True)


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def hw_keys(q: CouplingQuery) -> list:
    """All keys that can carry a nonzero coefficient, sorted descending."""
    L, R, T = q.left, q.right, q.target
    S = q.level_sum
    out = []
    for nu1 in range(min(L.lam + L.mu, S), -1, -1):
        n1 = S - nu1
        if n1 > R.lam + R.mu:
            break
        for tJ in su2_labels(L, nu1):
            for tIn in su2_labels(R, n1):
                if triangle(tJ, tIn, T.mu):
                    out.append((nu1, tJ, n1, tIn))
    return out


def _low(irr: IrrepLabel, u1: int, tfrom: int, tto: int) -> ExactReal:
    """Generator lowering rme from (u1, tfrom) to (u1-1, tto), zero if either multiplet is absent."""
    if tto < 0 or tfrom < 0:
        return ExactReal()
    try:
        return lowering2(irr, irr.lam + irr.mu - u1, tfrom, tto)
    except OutOfRange:
        return ExactReal()


# Each relation returns (coefficient of the produced key, produced key, [(coef, source key)]),
# meaning  coef_target * R(target) = sum coef_i * R(source_i).


def _rel_lower_left(q: CouplingQuery, bra: Key, tJt: int):
    """Left-lowered key (nu1'-1, J~, n1', I'_n) against sources (nu1', J', n1'-1, I_n)."""
    nu1p, tJp, n1p, tInp = bra
    L, R, q2 = q.left, q.right, q.target.mu
    a = _low(L, nu1p, tJp, tJt)
    srcs = []
    for tIn in (tInp - 1, tInp + 1):
        if tIn < 0:
            continue
        num = _low(R, n1p, tInp, tIn)
        if num.is_zero():
            continue
        six = sixj2(1, tJp, tJt, q2, tInp, tIn)
        if six.is_zero():
            continue
        c = num * six * (_sgn((tIn + tJp + q2) // 2 + 1) * (tJt + 1))
        srcs.append((c, (nu1p, tJp, n1p - 1, tIn)))
    return a, (nu1p - 1, tJt, n1p, tInp), srcs


def _rel_lower_right(q: CouplingQuery, bra: Key, tInt: int):
    """Right-lowered key (nu1', J', n1'-1, I~_n) against sources (nu1'-1, J, n1', I'_n)."""
    nu1p, tJp, n1p, tInp = bra
    L, R, q2 = q.left, q.right, q.target.mu
    a = _low(R, n1p, tInp, tInt)
    srcs = []
    for tJ in (tJp - 1, tJp + 1):
        if tJ < 0:
            continue
        num = _low(L, nu1p, tJp, tJ)
        if num.is_zero():
            continue
        six = sixj2(1, tJp, tJ, q2, tInp, tInt)
        if six.is_zero():
            continue
        c = num * six * (_sgn((tJp - tInt + q2 + 2 * tInp) // 2) * (tInt + 1))
        srcs.append((c, (nu1p - 1, tJ, n1p, tInp)))
    return a, (nu1p, tJp, n1p - 1, tInt), srcs


def _bras_for(q: CouplingQuery, key: Key, direction: str) -> Iterable:
    nu1, tJ, n1, tIn = key
    if direction == "lower-left":
        for tJp in (tJ - 1, tJ + 1):
            if tJp >= 0 and tJp in su2_labels(q.left, nu1 + 1):
                yield _rel_lower_left(q, (nu1 + 1, tJp, n1, tIn), tJ)
    else:
        for tInp in (tIn - 1, tIn + 1):
            if tInp >= 0 and tInp in su2_labels(q.right, n1 + 1):
                yield _rel_lower_right(q, (nu1, tJ, n1 + 1, tInp), tIn)


def recursion_step(query: CouplingQuery, known: dict, target_key: Key, direction: str = "lower-left") -> ExactReal:
    """One recursion step producing ``target_key`` from already-known keys.

    Tries each admissible intermediate label; raises ZeroDenominator if every choice has a
    vanishing divisor, MissingSource if a needed source is absent from ``known``.
    """
    keyset = set(hw_keys(query))
    missing = None
    for a, _, srcs in _bras_for(query, target_key, direction):
        if a.is_zero():
            continue
        total = ExactReal()
        ok = True
        for c, sk in srcs:
            if sk not in keyset:
                continue
            if sk not in known:
                ok, missing = False, sk
                break
            total = total + c * known[sk]
        if ok:
            return total / a
    if missing is not None:
        raise MissingSource(missing)
    raise ZeroDenominator(f"no usable {direction} relation for key {target_key}")


# ---------------------------------------------------------------------------
# linear combinations over free parameters


def _lc_add(acc: dict, lc: dict, c: ExactReal) -> None:
    for p, v in lc.items():
        w = acc.get(p)
        nv = v * c if w is None else w + v * c
        if nv.is_zero():
            acc.pop(p, None)
        else:
            acc[p] = nv


def _sweep(q: CouplingQuery, direction: str):
    """Express every key as a combination of free parameters."""
    keys = hw_keys(q)
    keyset = set(keys)
    if direction == "lower-left":
        order = sorted(keys, key=lambda k: (-k[0], -k[1], -k[3]))
        top = keys[0][0] if keys else None
        is_top = lambda k: k[0] == top  # noqa: E731
    else:
        order = sorted(keys, key=lambda k: (-k[2], -k[3], -k[1]))
        top = max(k[2] for k in keys) if keys else None
        is_top = lambda k: k[2] == top  # noqa: E731
    expr: dict = {}
    nparams = 0
    for key in order:
        done = False
        if not is_top(key):
            for a, _, srcs in _bras_for(q, key, direction):
                if a.is_zero():
                    continue
                acc: dict = {}
                for c, sk in srcs:
                    if sk in keyset:
                        _lc_add(acc, expr[sk], c)
                inv = a.inverse()
                expr[key] = {p: v * inv for p, v in acc.items()}
                done = True
                break
        if not done:
            expr[key] = {nparams: ExactReal(1)}
            nparams += 1
    return keys, expr, nparams


def _all_relations(q: CouplingQuery, direction: str):
    """Every relation of the chosen family, as (coef, key, sources)."""
    L, R = q.left, q.right
    S = q.level_sum
    for nu1p in range(0, L.lam + L.mu + 1):
        n1p = S + 1 - nu1p
        if n1p < 0 or n1p > R.lam + R.mu:
            continue
        for tJp in su2_labels(L, nu1p):
            for tInp in su2_labels(R, n1p):
                bra = (nu1p, tJp, n1p, tInp)
                if direction == "lower-left":
                    for tJt in (tJp - 1, tJp + 1):
                        if tJt >= 0:
                            yield _rel_lower_left(q, bra, tJt)
                else:
                    for tInt in (tInp - 1, tInp + 1):
                        if tInt >= 0:
                            yield _rel_lower_right(q, bra, tInt)


def _nullspace(rows: list, n: int) -> list:
    """Exact nullspace of a dense list of rows (each a list of ExactReal of length n)."""
    m = [list(r) for r in rows if any(not x.is_zero() for x in r)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [ExactReal() for _ in range(n)]
        v[fc] = ExactReal(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def _evaluate(expr: dict, z: list) -> dict:
    out = {}
    for key, lc in expr.items():
        tot = ExactReal()
        for p, v in lc.items():
            if not z[p].is_zero():
                tot = tot + v * z[p]
        out[key] = tot
    return out


def _solution_space(q: CouplingQuery, direction: str):
    keys, expr, f = _sweep(q, direction)
    mult = q.multiplicity
    if f == mult:
        basis = [[ExactReal(1 if i == j else 0) for j in range(f)] for i in range(f)]
    else:
        keyset = set(keys)
        rows = []
        for a, tk, srcs in _all_relations(q, direction):
            acc: dict = {}
            if tk in keyset and not a.is_zero():
                _lc_add(acc, expr[tk], a)
            for c, sk in srcs:
                if sk in keyset:
                    _lc_add(acc, expr[sk], -c)
            if acc:
                rows.append([acc.get(i, ExactReal()) for i in range(f)])
        basis = _nullspace(rows, f)
    if len(basis) != mult:
        raise AssertionError(f"solution space has dimension {len(basis)}, expected {mult}")
    return keys, [_evaluate(expr, z) for z in basis]


def _sqrt_rational(x: ExactReal) -> ExactReal:
    if not x.is_rational():
        raise NonRationalNorm(f"squared norm {x} is not rational")
    return ExactReal.sqrt(x.to_fraction())


def _normalize(vec: dict) -> dict:
    n2 = ExactReal()
    for v in vec.values():
        n2 = n2 + v * v
    if n2.is_zero():
        raise ArithmeticError("zero hw vector")
    inv = _sqrt_rational(n2).inverse()
    return {k: v * inv for k, v in vec.items()}


def convention_key(q: CouplingQuery) -> Key:
    """Left factor at its hw, right-factor su(2) label as large as the coupling allows."""
    L, T = q.left, q.target
    nu1 = L.lam + L.mu
    n1 = q.level_sum - nu1
    for tIn in su2_labels(q.right, n1):
        if triangle(L.mu, tIn, T.mu):
            return (nu1, L.mu, n1, tIn)
    raise ConventionUnavailable("no key with the left factor at its highest weight")


def _apply_sign(q: CouplingQuery, vec: dict) -> dict:
    ck = convention_key(q)
    ref = vec.get(ck, ExactReal())
    if ref.is_zero():
        raise ConventionUnavailable(f"sign convention coefficient vanishes at {ck}")
    return vec if ref.sign() > 0 else {k: -v for k, v in vec.items()}


def _dot(a: dict, b: dict) -> ExactReal:
    tot = ExactReal()
    for k, v in a.items():
        w = b.get(k)
        if w is not None:
            tot = tot + v * w
    return tot


def _generator_first(q: CouplingQuery, sols: list) -> dict:
    """Copy proportional to the generator matrix elements, for (1,1) x (l,m) -> (l,m).

    The adjoint states of weight zero map to (2C11-C22-C33)/sqrt(6) (J=0) and
    -(C22-C33)/sqrt(2) (J=1).  On the hw their expectation values are (2l+m)/sqrt(6)
    and -m/sqrt(2), which fixes the ratio of the two full coefficients.
    """
    lam, mu = q.right.lam, q.right.mu
    n1 = lam + mu
    k0, k1 = (1, 0, n1, mu), (1, 2, n1, mu)
    g0 = ExactReal.sqrt(Fraction(1, 6)) * (2 * lam + mu)
    g1 = ExactReal.sqrt(Fraction(1, 2)) * (-mu)
    c0 = cg2(0, 0, mu, mu, mu, mu)
    c1 = cg2(2, 0, mu, mu, mu, mu)
    # full coefficients c0*R0 : c1*R1 must equal g0 : g1
    a, b = c0 * g1, c1 * g0
    f = [a * s.get(k0, ExactReal()) - b * s.get(k1, ExactReal()) for s in sols]
    if f[0].is_zero() and f[1].is_zero():
        raise ConventionUnavailable("generator condition is degenerate")
    if f[1].is_zero():
        return sols[1]
    if f[0].is_zero():
        return sols[0]
    r = f[0] / f[1]
    out = dict(sols[0])
    for key, v in sols[1].items():
        out[key] = out.get(key, ExactReal()) - r * v
    return out


def _orthonormal_copies(q: CouplingQuery, sols: list, keys: list):
    mult = len(sols)
    if mult == 1:
        return [_apply_sign(q, _normalize(sols[0]))], "hw-sign"
    if mult == 2 and q.left == IrrepLabel(1, 1) and q.right == q.target:
        first = _apply_sign(q, _normalize(_generator_first(q, sols)))
        # orthogonal complement of `first` in the span
        cand = []
        for s in sols:
            d = _dot(first, s)
            cand.append({k: s.get(k, ExactReal()) - d * first.get(k, ExactReal()) for k in set(s) | set(first)})
        second = max(cand, key=lambda v: sum(1 for x in v.values() if not x.is_zero()))
        return [first, _apply_sign(q, _normalize(second))], "generator"
    # deterministic Gram-Schmidt seeded by lexicographically largest keys
    order = sorted(keys, reverse=True)
    basis = []
    pool = [dict(s) for s in sols]
    for _ in range(mult):
        best = None
        for key in order:
            for s in pool:
                if not s.get(key, ExactReal()).is_zero():
                    best = s
                    break
            if best is not None:
                break
        pool.remove(best)
        v = dict(best)
        for b in basis:
            d = _dot(b, v)
            v = {k: v.get(k, ExactReal()) - d * b.get(k, ExactReal()) for k in set(v) | set(b)}
        v = _normalize(v)
        try:
            v = _apply_sign(q, v)
        except ConventionUnavailable:
            first = next(k for k in order if not v.get(k, ExactReal()).is_zero())
            if v[first].sign() < 0:
                v = {k: -x for k, x in v.items()}
        basis.append(v)
    return basis, "lexicographic"


def _finish(q: CouplingQuery, keys: list, sols: list) -> list:
    copies, tag = _orthonormal_copies(q, sols, keys)
    k = q.k
    out = []
    for rho, vec in enumerate(copies, start=1):
        full = {key: vec.get(key, ExactReal()) for key in keys}
        out.append(HwVector(CouplingQuery(q.left, q.right, q.target, rho), full, k, rho, tag))
    return out


def solve_hw_all(left, right, target, *, direction: str = "lower-left", strict: bool = False) -> list:
    """Every copy of the target hw, as a list of HwVector ordered by rho."""
    q = CouplingQuery.make(left, right, target)
    if not q.multiplicity:
        raise NotInProduct(f"{q.target} is not in {q.left} x {q.right}")
    keys, sols = _solution_space(q, direction)
    out = _finish(q, keys, sols)
    if strict and out[0].convention == "lexicographic":
        raise ConventionUnavailable(f"no convention for {q.multiplicity} copies of {q.target}")
    return out


_CACHE: dict = {}


def solve_hw(query: CouplingQuery, *, direction: str = "lower-left"):
    """The target hw vector.  Multiplicity-free: one HwVector; otherwise a list unless rho is set."""
    ck = (query.left, query.right, query.target, direction)
    vecs = _CACHE.get(ck)
    if vecs is None:
        vecs = solve_hw_all(query.left, query.right, query.target, direction=direction)
        _CACHE[ck] = vecs
    if query.rho is not None:
        if not 1 <= query.rho <= len(vecs):
            raise ValueError(f"rho={query.rho} out of range 1..{len(vecs)}")
        return vecs[query.rho - 1]
    return vecs[0] if len(vecs) == 1 else list(vecs)


def clear_cache() -> None:
    _CACHE.clear()


# ---------------------------------------------------------------------------
# closed forms


def hw_k0_closed_form(query: CouplingQuery) -> HwVector:
    """Grade-zero hw: every coefficient is a single su(2) CG of the 12-subalgebra."""
    q = query
    if q.k != 0:
        raise GradeNotZero(f"grade is {q.k}")
    L, R, T = q.left, q.right, q.target
    entries = {}
    for key in hw_keys(q):
        nu1, tJ, n1, tIn = key
        if tJ != L.lam + 2 * L.mu - nu1 or tIn != R.lam + 2 * R.mu - n1:
            entries[key] = ExactReal()
            continue
        tm1 = 2 * nu1 - 2 * L.mu - L.lam
        tm2 = 2 * n1 - 2 * R.mu - R.lam
        entries[key] = cg2(L.lam, tm1, R.lam, tm2, T.lam, T.lam)
    return HwVector(CouplingQuery(L, R, T, 1), entries, 0)


def _lambda0_factor(p1: int, q1: int, lam: int, q2: int, nu1: int, tJp: int, n1p: int, plus: bool):
    """Closed-form step factor from (nu1, J', n1'-1) to (nu1-1, J' +- 1/2, n1')."""
    Jp = Fraction(tJp, 2)
    if plus:
        num = 2 * n1p * (Jp + 1) * (Fraction(q2 + lam - n1p + 1, 2) - Jp) * (Fraction(q2 - lam + n1p + 1, 2) + Jp)
        den = (2 * Jp + 1) * (Fraction(p1 + nu1, 2) - Jp) * (Fraction(p1 - nu1, 2) + Jp + 1) * (
            Fraction(p1 + 2 * q1 - nu1, 2) + Jp + 2
        )
        sign = -1
    else:
        num = n1p * (2 * Jp) * (Fraction(1 - q2 + lam - n1p, 2) + Jp) * (Fraction(3 + q2 + lam - n1p, 2) + Jp)
        den = (2 * Jp + 1) * (Fraction(p1 + nu1, 2) + Jp + 1) * (Fraction(p1 + 2 * q1 - nu1, 2) - Jp + 1) * (
            Fraction(nu1 - p1, 2) + Jp
        )
        sign = 1
    if den == 0 or num / den < 0:
        return None
    return ExactReal.sqrt(num / den, sign)


def hw_lambda0_chains(query: CouplingQuery) -> HwVector:
    """(lambda,0) right factor: chains of constant nu3 from the seed, joined by J-lowering steps."""
    q = query
    L, R, T = q.left, q.right, q.target
    if R.mu != 0:
        raise ValueError("right factor must be (lambda, 0)")
    if not q.multiplicity:
        raise NotInProduct(f"{T} is not in {L} x {R}")
    keys = hw_keys(q)
    keyset = set(keys)
    seed = keys[0]
    vals = {seed: ExactReal(1)}
    for key in keys[1:]:
        nu1, tJ, n1, tIn = key
        val = None
        for plus, tJp in ((True, tJ - 1), (False, tJ + 1)):
            src = (nu1 + 1, tJp, n1 - 1, tIn + 1)
            if tJp < 0 or src not in keyset:
                continue
            fac = _lambda0_factor(L.lam, L.mu, R.lam, T.mu, nu1 + 1, tJp, n1, plus)
            if fac is None:
                continue
            val = fac * vals[src]
            break
        vals[key] = val if val is not None else ExactReal()
    vec = _apply_sign(q, _normalize(vals))
    return HwVector(CouplingQuery(L, R, T, 1), {k: vec.get(k, ExactReal()) for k in keys}, q.k)


# ---------------------------------------------------------------------------
# independent check: raising-generator annihilation on the expanded product state


def _expand(hw: HwVector) -> dict:
    """Full product-basis coefficients {(nu1, tJ, tm, n1, tIn, tmn): value}."""
    q = hw.query
    Q2 = q.target.mu
    out = {}
    for (nu1, tJ, n1, tIn), r in hw.entries.items():
        if r.is_zero():
            continue
        for tm in range(-tJ, tJ + 1, 2):
            tmn = Q2 - tm
            if abs(tmn) > tIn:
                continue
            c = cg2(tJ, tm, tIn, tmn, Q2, Q2)
            if not c.is_zero():
                out[(nu1, tJ, tm, n1, tIn, tmn)] = r * c
    return out


def _raise_one(irr: IrrepLabel, u1: int, tJ: int, tm: int, comp: int):
    """Matrix elements <(u1+1) J' m+comp | Tbar_{comp/2} | u1 J m> for comp = +-1."""
    p = irr.lam + irr.mu - u1
    res = []
    for tJp in (tJ - 1, tJ + 1):
        if tJp < 0 or tJp not in su2_labels(irr, u1 + 1):
            continue
        try:
            r = raising2(irr, p, tJ, tJp)
        except OutOfRange:
            continue
        c = cg2(tJ, tm, 1, comp, tJp, tm + comp)
        if r.is_zero() or c.is_zero():
            continue
        res.append((tJp, r * c * ExactReal.sqrt(Fraction(1, tJp + 1))))
    return res


def annihilation_residual(hw: HwVector, generator: str = "C12") -> dict:
    """Coefficients of C12|hw> or C13|hw>; all zero for a genuine highest weight."""
    q = hw.query
    comp, phase = {"C13": (1, 1), "C12": (-1, -1)}[generator]
    out: dict = {}
    for (nu1, tJ, tm, n1, tIn, tmn), v in _expand(hw).items():
        for tJp, me in _raise_one(q.left, nu1, tJ, tm, comp):
            key = (nu1 + 1, tJp, tm + comp, n1, tIn, tmn)
            out[key] = out.get(key, ExactReal()) + v * me * phase
        for tInp, me in _raise_one(q.right, n1, tIn, tmn, comp):
            key = (nu1, tJ, tm, n1 + 1, tInp, tmn + comp)
            out[key] = out.get(key, ExactReal()) + v * me * phase
    return {k: v for k, v in out.items() if not v.is_zero()}
