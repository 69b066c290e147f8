"""Brute-force oscillator realization of SU(3) states, used as an independent oracle.

States of one irrep are polynomials in the nine creation operators a+_{i,alpha}
(row i labels the u(3) generators C_ij, column alpha the auxiliary index), stored as
sparse maps from exponent tuples to exact coefficients over *unnormalized*
monomials, so that <e|e> = prod(e!).

Coupling coefficients come from an intertwiner built by linear substitution of the
column index: a+_{i,alpha} -> sum_beta X[alpha][beta] b+_{i,beta} + Y[alpha][beta] c+_{i,beta}.
The substitution touches columns only, so it commutes with every C_ij; projecting the
image of |target> * det^k onto product states of the two factors gives the coupling
coefficients up to one constant per copy, fixed by normalizing at the highest weight.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod

from .exact import ExactReal, factorial
from .rep import (
    IrrepLabel,
    StateLabel,
    decompose_product,
    dimension,
    enumerate_states,
    grade,
    highest_weight,
    irrep,
    su2_labels,
)
from .wigner import cg2, triangle as _tri

__all__ = [
    "FockVector",
    "TooLarge",
    "realize_state",
    "apply_generator",
    "determinant_power",
    "OracleTable",
    "oracle_tables",
    "oracle_cg",
    "project_matrix_element",
    "adjoint_intertwiner",
    "permute_rows",
    "project_permutation",
]

MAX_PRODUCT_DIM = 100


class TooLarge(ValueError):
    """Oracle request exceeds the brute-force size cap."""


def _mode(i: int, a: int) -> int:
    """Flat index of a+_{i a}, both 1-based."""
    return 3 * (i - 1) + (a - 1)


def _zero_exps(n: int = 9) -> list[int]:
    return [0] * n


class FockVector:
    """Sparse polynomial vector; values are ExactReal or int/Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, ...], ExactReal] = {}
        if terms:
            for k, v in terms.items():
                v = v if isinstance(v, ExactReal) else ExactReal(v)
                if not v.is_zero():
                    self.terms[k] = v

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __eq__(self, other):
        return isinstance(other, FockVector) and self.terms == other.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return FockVector(out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def scale(self, c) -> "FockVector":
        c = c if isinstance(c, ExactReal) else ExactReal(c)
        if c.is_zero():
            return FockVector()
        return FockVector({k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def inner(self, other: "FockVector") -> ExactReal:
        a, b = (self, other) if len(self) <= len(other) else (other, self)
        total = ExactReal()
        for k, v in a.terms.items():
            w = b.terms.get(k)
            if w is not None:
                total = total + v * w * _monomial_norm2(k)
        return total

    def norm2(self) -> ExactReal:
        return self.inner(self)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items(), reverse=True))
        return f"FockVector({{{inner}}})"


@lru_cache(maxsize=1 << 16)
def _monomial_norm2(e: tuple[int, ...]) -> int:
    return prod(factorial(x) for x in e)


@lru_cache(maxsize=4096)
def _realize(st: StateLabel) -> FockVector:
    lam = st.irrep.lam
    n1, n2, n3 = st.nu
    tI = st.tI
    terms: dict[tuple[int, ...], ExactReal] = {}
    for tm3 in range(-n3, n3 + 1, 2):
        for tm2 in range(-n2, n2 + 1, 2):
            tN = tm2 + tm3
            if abs(tN) > tI:
                continue
            tm1 = lam - tN
            if abs(tm1) > n1:
                continue
            c = cg2(n3, tm3, n2, tm2, tI, tN)
            if c.is_zero():
                continue
            c = c * cg2(tI, tN, n1, tm1, lam, lam)
            if c.is_zero():
                continue
            e = _zero_exps()
            den = 1
            for i, (n, tm) in enumerate(((n1, tm1), (n2, tm2), (n3, tm3)), start=1):
                up, dn = (n + tm) // 2, (n - tm) // 2
                e[_mode(i, 1)] = up
                e[_mode(i, 2)] = dn
                den *= factorial(up) * factorial(dn)
            key = tuple(e)
            v = c * ExactReal.sqrt(Fraction(1, den))
            terms[key] = terms[key] + v if key in terms else v
    return FockVector(terms)


def realize_state(label: StateLabel) -> FockVector:
    """Polynomial realization of a basis state, built from the double su(2) coupling."""
    if not label.is_valid():
        raise ValueError(f"invalid state {label}")
    return _realize(label)


def apply_generator(v: FockVector, i: int, j: int, n_rows: int = 3) -> FockVector:
    """C_ij = sum_alpha a+_{i alpha} a_{j alpha}.  Works on 9- and 18-mode vectors."""
    out: dict[tuple[int, ...], ExactReal] = {}
    for key, c in v.terms.items():
        n_sys = len(key) // 9
        for s in range(n_sys):
            for a in (1, 2, 3):
                src = 9 * s + _mode(j, a)
                ex = key[src]
                if ex == 0:
                    continue
                e = list(key)
                e[src] -= 1
                e[9 * s + _mode(i, a)] += 1
                k2 = tuple(e)
                term = c * ex
                out[k2] = out[k2] + term if k2 in out else term
    return FockVector(out)


# ---------------------------------------------------------------------------
# integer polynomials for the determinant and substitutions

Poly = dict  # exponent tuple -> int


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=64)
def _det_power(k: int) -> tuple:
    det: Poly = {}
    for perm in itertools.permutations((1, 2, 3)):
        inv = sum(1 for x in range(3) for y in range(x + 1, 3) if perm[x] > perm[y])
        e = _zero_exps()
        for i, a in enumerate(perm, start=1):
            e[_mode(i, a)] += 1
        det[tuple(e)] = -1 if inv & 1 else 1
    out: Poly = {tuple(_zero_exps()): 1}
    for _ in range(k):
        out = _poly_mul(out, det)
    return tuple(out.items())


def determinant_power(k: int) -> FockVector:
    """det(a+)^k as a FockVector with integer coefficients."""
    return FockVector(dict(_det_power(k)))


@dataclass(frozen=True)
class Substitution:
    """Column substitution: rows of X, Y are the images of columns 1..3 in b and c columns 1..2."""

    X: tuple[tuple[int, int], ...]
    Y: tuple[tuple[int, int], ...]


def _default_substitutions() -> list[Substitution]:
    subs = [
        Substitution(((1, 0), (0, 1), (0, 0)), ((0, 0), (1, 0), (0, 1))),
        Substitution(((1, 0), (0, 1), (0, 0)), ((1, 0), (0, 1), (0, 0))),
        Substitution(((1, 0), (0, 1), (0, 1)), ((1, 0), (1, 1), (0, 1))),
    ]
    rng = random.Random(20240917)
    for _ in range(12):
        X = tuple(tuple(rng.randint(-2, 2) for _ in range(2)) for _ in range(3))
        Y = tuple(tuple(rng.randint(-2, 2) for _ in range(2)) for _ in range(3))
        subs.append(Substitution(X, Y))
    return subs


@lru_cache(maxsize=1 << 15)
def _row_image(row_exps: tuple[int, int, int], sub: Substitution) -> tuple:
    """Expand prod_alpha (sum X b + Y c)^e_alpha for one row; keys (b1, b2, c1, c2)."""
    out: Poly = {(0, 0, 0, 0): 1}
    for alpha, e in enumerate(row_exps):
        if not e:
            continue
        lin = {}
        for beta in range(2):
            if sub.X[alpha][beta]:
                key = [0, 0, 0, 0]
                key[beta] = 1
                lin[tuple(key)] = sub.X[alpha][beta]
            if sub.Y[alpha][beta]:
                key = [0, 0, 0, 0]
                key[2 + beta] = 1
                lin[tuple(key)] = sub.Y[alpha][beta]
        if not lin:
            return ()
        for _ in range(e):
            out = _poly_mul(out, lin)
    return tuple(out.items())


def _substitute(key: tuple[int, ...], sub: Substitution, colb: tuple[int, int], colc: tuple[int, int]):
    """Image of one 9-mode monomial as (b 9-tuple, c 9-tuple) -> int, pruned to column totals."""
    rows = []
    for i in range(3):
        img = _row_image(key[3 * i : 3 * i + 3], sub)
        if not img:
            return {}
        rows.append(img)
    out: dict = {}
    target = (colb[0], colb[1], colc[0], colc[1])
    for (k1, v1) in rows[0]:
        for (k2, v2) in rows[1]:
            part = tuple(x + y for x, y in zip(k1, k2))
            if any(p > t for p, t in zip(part, target)):
                continue
            need = tuple(t - p for p, t in zip(part, target))
            for (k3, v3) in rows[2]:
                if k3 != need:
                    continue
                b = (k1[0], k1[1], 0, k2[0], k2[1], 0, k3[0], k3[1], 0)
                c = (k1[2], k1[3], 0, k2[2], k2[3], 0, k3[2], k3[3], 0)
                out[(b, c)] = out.get((b, c), 0) + v1 * v2 * v3
    return out


def _column_totals(irr: IrrepLabel) -> tuple[int, int]:
    return (irr.lam + irr.mu, irr.mu)


def _overlaps(t: StateLabel, k: int, sub: Substitution, left: IrrepLabel, right: IrrepLabel, bstates, cstates):
    """Raw overlaps <b|<c| S (|t> det^k) for all weight-compatible product pairs."""
    vec = _realize(t).terms
    if k:
        detk = dict(_det_power(k))
        full: dict = {}
        for ka, va in vec.items():
            for kb, vb in detk.items():
                kk = tuple(x + y for x, y in zip(ka, kb))
                term = va * vb
                full[kk] = full[kk] + term if kk in full else term
        vec = {kk: v for kk, v in full.items() if not v.is_zero()}
    colb, colc = _column_totals(left), _column_totals(right)
    G: dict = {}
    for key, coeff in vec.items():
        for (eb, ec), n in _substitute(key, sub, colb, colc).items():
            row = G.setdefault(eb, {})
            term = coeff * n
            row[ec] = row[ec] + term if ec in row else term
    out = {}
    tw = t.weight
    for bs in bstates:
        ψb = _realize(bs).terms
        u: dict = {}
        for eb, cb in ψb.items():
            row = G.get(eb)
            if not row:
                continue
            w = cb * _monomial_norm2(eb)
            for ec, val in row.items():
                term = w * val
                u[ec] = u[ec] + term if ec in u else term
        if not u:
            continue
        for cs in cstates:
            if (bs.weight[0] + cs.weight[0], bs.weight[1] + cs.weight[1]) != (tw[0] + 0, tw[1] + 0):
                continue
            total = ExactReal()
            for ec, cc in _realize(cs).terms.items():
                val = u.get(ec)
                if val is not None:
                    total = total + cc * val * _monomial_norm2(ec)
            if not total.is_zero():
                out[(bs, cs)] = total
    return out


@dataclass
class OracleTable:
    """Projection tables for one target irrep.

    ``raw[r]`` maps (bra1, bra2, target state) to the unnormalized overlap for the r-th
    independent intertwiner; ``gram`` is their rational Gram matrix.  For multiplicity 1,
    ``values`` holds the normalized coefficients re-signed to the hw sign convention and
    ``reconciliation`` the sign applied relative to the raw projection.
    """

    left: IrrepLabel
    right: IrrepLabel
    target: IrrepLabel
    k: int
    multiplicity: int
    substitutions: list = field(default_factory=list)
    raw: list = field(default_factory=list)
    gram: list = field(default_factory=list)
    values: dict | None = None
    reconciliation: int | None = None


def _convention_key(left: IrrepLabel, right: IrrepLabel, target: IrrepLabel, k: int):
    """(bra1, bra2, target) labels of the coefficient fixed non-negative by convention."""
    ln = (target.lam + target.mu + k - (left.lam + left.mu), target.mu + k - left.mu, k)
    for tI in su2_labels(right, ln[0]):
        st = StateLabel(right, ln, tI)
        if st.is_valid() and _tri(left.mu, tI, target.mu):
            return highest_weight(left), st, highest_weight(target)
    raise ValueError("no state of the right factor matches the convention key")


def _gram(raws, hw):
    n = len(raws)
    g = [[ExactReal() for _ in range(n)] for _ in range(n)]
    for r in range(n):
        for s in range(r, n):
            tot = ExactReal()
            for key, v in raws[r].items():
                if key[2] != hw:
                    continue
                w = raws[s].get(key)
                if w is not None:
                    tot = tot + v * w
            g[r][s] = g[s][r] = tot
    return g


def _rank(gram) -> int:
    """Rank of a small symmetric matrix with exact entries (fraction-free elimination on floats is not exact)."""
    m = [[x for x in row] for row in gram]
    n = len(m)
    rank = 0
    cols = list(range(n))
    rows = list(range(n))
    for c in cols:
        piv = next((r for r in rows if not m[r][c].is_zero()), None)
        if piv is None:
            continue
        rows.remove(piv)
        rank += 1
        for r in rows:
            if m[r][c].is_zero():
                continue
            f = m[r][c] / m[piv][c]
            m[r] = [m[r][j] - f * m[piv][j] for j in range(n)]
    return rank


def oracle_tables(left, right, target, *, max_product_dim: int = MAX_PRODUCT_DIM, substitutions=None) -> OracleTable:
    left, right, target = irrep(left), irrep(right), irrep(target)
    if dimension(left) * dimension(right) > max_product_dim:
        raise TooLarge(f"{left} x {right} has dimension {dimension(left) * dimension(right)} > {max_product_dim}")
    mult = decompose_product(left, right).multiplicity(target)
    if not mult:
        from .rep import NotInProduct

        raise NotInProduct(f"{target} not in {left} x {right}")
    k = grade(left, right, target)
    bstates, cstates = enumerate_states(left), enumerate_states(right)
    tstates = enumerate_states(target)
    hw = highest_weight(target)
    chosen, raws = [], []
    for sub in substitutions or _default_substitutions():
        ov = _overlaps(hw, k, sub, left, right, bstates, cstates)
        if not ov:
            continue
        cand = raws + [{(b, c, hw): v for (b, c), v in ov.items()}]
        if _rank(_gram(cand, hw)) == len(cand):
            chosen.append(sub)
            raws = cand
        if len(chosen) == mult:
            break
    if len(chosen) < mult:
        raise RuntimeError(f"found only {len(chosen)} of {mult} independent intertwiners")
    for r, sub in enumerate(chosen):
        for t in tstates:
            if t == hw:
                continue
            for (b, c), v in _overlaps(t, k, sub, left, right, bstates, cstates).items():
                raws[r][(b, c, t)] = v
    table = OracleTable(left, right, target, k, mult, chosen, raws, _gram(raws, hw))
    if mult == 1:
        c2 = table.gram[0][0]
        if not c2.is_rational():
            raise AssertionError("normalization constant is not rational")
        inv_c = ExactReal.sqrt(1 / c2.to_fraction())
        ref = raws[0].get(_convention_key(left, right, target, k))
        if ref is None or ref.is_zero():
            raise AssertionError("convention coefficient vanishes")
        s = ref.sign()
        table.reconciliation = s
        scale = inv_c * s
        table.values = {key: v * scale for key, v in raws[0].items()}
    return table


def oracle_cg(query, bra1: StateLabel, bra2: StateLabel, target: StateLabel) -> ExactReal:
    """Normalized coupling coefficient by projection, multiplicity-free targets only."""
    left, right, tirr = query if isinstance(query, tuple) else (query.left, query.right, query.target)
    tab = oracle_tables(left, right, tirr)
    if tab.values is None:
        raise ValueError("oracle_cg needs a multiplicity-free target; use oracle_tables")
    return tab.values.get((bra1, bra2, target), ExactReal())


def project_matrix_element(bra: StateLabel, i: int, j: int, ket: StateLabel) -> ExactReal:
    """<bra| C_ij |ket> by explicit application and projection."""
    return realize_state(bra).inner(apply_generator(realize_state(ket), i, j))


def _commutator_unit(i: int, j: int, m: tuple) -> tuple:
    """[E_ij, M] for a 3x3 matrix stored as a tuple of row tuples."""
    out = [[ExactReal() for _ in range(3)] for _ in range(3)]
    for b in range(3):
        out[i - 1][b] = out[i - 1][b] + m[j - 1][b]
    for a in range(3):
        out[a][j - 1] = out[a][j - 1] - m[a][i - 1]
    return tuple(tuple(r) for r in out)


@lru_cache(maxsize=1)
def adjoint_intertwiner() -> dict:
    """Equivariant map from (1,1) basis states to 3x3 matrices, hw -> E_13.

    Built by applying generators to the hw alongside commutators with the matrix
    images, then solving for the image of each basis state.
    """
    adj = IrrepLabel(1, 1)
    basis = enumerate_states(adj)
    vecs = {b: realize_state(b) for b in basis}
    hw = highest_weight(adj)
    e13 = tuple(tuple(ExactReal(1 if (a, b) == (0, 2) else 0) for b in range(3)) for a in range(3))
    pairs = [(vecs[hw], e13)]
    frontier = list(pairs)
    while frontier and len(pairs) < 40:
        nxt = []
        for v, m in frontier:
            for i, j in ((2, 1), (3, 2), (3, 1)):
                w = apply_generator(v, i, j)
                if not w.is_zero():
                    nxt.append((w, _commutator_unit(i, j, m)))
        pairs.extend(nxt)
        frontier = nxt
    # Gauss-Jordan on [coordinates | matrix entries]
    n = len(basis)
    rows = [[v.inner(vecs[b]) for b in basis] + [x for r in m for x in r] for v, m in pairs]
    out = {}
    r0 = 0
    for col in range(n):
        piv = next((r for r in range(r0, len(rows)) if not rows[r][col].is_zero()), None)
        if piv is None:
            raise AssertionError("adjoint intertwiner did not reach every basis state")
        rows[r0], rows[piv] = rows[piv], rows[r0]
        inv = rows[r0][col].inverse()
        rows[r0] = [x * inv for x in rows[r0]]
        for r in range(len(rows)):
            if r != r0 and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[r0])]
        r0 += 1
    for col, b in enumerate(basis):
        mm = rows[col][n:]
        out[b] = tuple(tuple(mm[3 * a + x] for x in range(3)) for a in range(3))
    return out


def permute_rows(v: FockVector, images: tuple) -> FockVector:
    """Apply a+_{i,alpha} -> a+_{sigma(i),alpha}; ``images`` = (sigma(1), sigma(2), sigma(3))."""
    out = {}
    for key, c in v.terms.items():
        e = [0] * len(key)
        for s in range(len(key) // 9):
            for i in (1, 2, 3):
                for a in (1, 2, 3):
                    e[9 * s + _mode(images[i - 1], a)] = key[9 * s + _mode(i, a)]
        out[tuple(e)] = c
    return FockVector(out)


def project_permutation(bra: StateLabel, images: tuple, ket: StateLabel) -> ExactReal:
    """<bra| P_sigma |ket> by explicit row permutation."""
    return realize_state(bra).inner(permute_rows(realize_state(ket), images))
