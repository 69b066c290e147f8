"""Acceptance criteria 1-9.  Each test records one PASS/FAIL line (see conftest)."""
import functools
import logging
import time
from fractions import Fraction

from conftest import record
from oracles import differing, span_rank
from reference_tables import PERMUTATION_ELEMENTS, adjoint_pair, times_symmetric_two
from su3cg import hw as hwmod
from su3cg import wigner
from su3cg.conjugate_pair import hw_chain_closed_form, reduced_cg_3f2
from su3cg.engine import couple, full_cg, reduced_cg, reduced_cg_all
from su3cg.exact import ExactReal
from su3cg.fock import oracle_tables
from su3cg.hw import CouplingQuery, annihilation_residual, solve_hw, solve_hw_all
from su3cg.rep import IrrepLabel, StateLabel, decompose_product, dimension, su2_labels
from su3cg.symmetry import S3, conjugate_relation, interchange_order, permutation_matrix_element, weyl_evaluate, weyl_relate
from su3cg.wigner import cg2

log = logging.getLogger("acceptance")
st_ = StateLabel.make
ZERO = ExactReal()


def criterion(n):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                ok, detail = fn()
            except Exception as exc:
                record(n, False, f"raised {type(exc).__name__}: {exc}")
                raise
            record(n, ok, detail)
            assert ok, detail

        return run

    return wrap


def _irreps_upto(max_dim):
    return [IrrepLabel(a, b) for a in range(max_dim) for b in range(max_dim) if dimension((a, b)) <= max_dim]


def _pairs(max_prod):
    irr = _irreps_upto(max_prod)
    return [(L, R) for L in irr for R in irr if L.dim * R.dim <= max_prod]


@criterion(1)
def test_worked_examples():
    wigner.cache_clear()
    hwmod.clear_cache()
    cases = [
        (CouplingQuery.make((5, 1), (4, 0), (3, 4)),
         (st_((5, 1), (2, 4, 1), "3/2"), st_((4, 0), (1, 2, 1), "3/2"), st_((3, 4), (3, 6, 2), 2)),
         -ExactReal(7) / (20 * ExactReal.sqrt(2))),
        (CouplingQuery.make((1, 1), (3, 3), (3, 3), 2),
         (st_((1, 1), (1, 1, 1), 1), st_((3, 3), (3, 4, 2), 2), st_((3, 3), (3, 4, 2), 3)),
         -2 * ExactReal.sqrt(2) / 15),
    ]
    bad, times = [], []
    for q, states, want in cases:
        t0 = time.perf_counter()
        v = full_cg(q, *states)
        dt = time.perf_counter() - t0
        times.append(dt)
        if v != want or dt >= 1.0:
            bad.append((str(v), dt))
    return not bad, f"times {', '.join(f'{t:.3f}s' for t in times)}" + (f" bad={bad}" if bad else "")


@criterion(2)
def test_adjoint_table():
    bad = []
    for s in range(1, 21):
        r1, r2 = adjoint_pair(s)
        for direction in ("lower-left", "lower-right"):
            v1, v2 = solve_hw_all((1, 1), (s, s), (s, s), direction=direction)
            for ref, v in ((r1, v1), (r2, v2)):
                bad += [(s, direction, key) for key, x in ref.items() if v[key] != x]
    return not bad, f"sigma 1..20, 8 entries x 2 routes; mismatches {bad[:5]}" if bad else "sigma 1..20, both routes"


@criterion(3)
def test_symmetric_two_table():
    n, bad = 0, []
    for p in range(1, 9):
        for q in range(1, 9):
            for target, rows in times_symmetric_two(p, q).items():
                hw = solve_hw(CouplingQuery.make((p, q), (2, 0), target))
                listed = {k for k, _ in rows}
                for key, val in rows:
                    n += 1
                    if hw[key] != val:
                        bad.append((p, q, target, key))
                bad += [(p, q, target, k, "unlisted") for k, x in hw.entries.items() if k not in listed and not x.is_zero()]
    return not bad, f"{n} entries" + (f"; mismatches {bad[:5]}" if bad else "")


@criterion(4)
def test_permutation_table_and_weyl_sums():
    bad = []
    for irr, ket_nu, J, bra_nu, I, listed in PERMUTATION_ELEMENTS:
        v = permutation_matrix_element(irr, "P12", st_(irr, bra_nu, I), st_(irr, ket_nu, J))
        if v != listed:
            bad.append(f"<{irr}{bra_nu};{I}|P12|{irr}{ket_nu};{J}> = {v}, listed {listed}")
    q1 = CouplingQuery.make((5, 1), (4, 0), (3, 4))
    s1 = (st_((5, 1), (2, 4, 1), "3/2"), st_((4, 0), (1, 2, 1), "3/2"), st_((3, 4), (3, 6, 2), 2))
    q2 = CouplingQuery.make((1, 1), (3, 3), (3, 3), 2)
    s2 = (st_((1, 1), (1, 1, 1), 1), st_((3, 3), (3, 4, 2), 2), st_((3, 3), (3, 4, 2), 3))
    if len([c for c, _ in weyl_relate(q1, "P12", *s1) if not c.is_zero()]) != 3:
        bad.append("three-term expansion has the wrong length")
    if len(weyl_relate(q2, "P12", *s2)) != 10:
        bad.append("ten-term expansion has the wrong length")
    for name in S3:
        if weyl_evaluate(q1, name, *s1) != -ExactReal(7) / (20 * ExactReal.sqrt(2)):
            bad.append(f"three-term sum under {name}")
        if weyl_evaluate(q2, name, *s2) != -2 * ExactReal.sqrt(2) / 15:
            bad.append(f"ten-term sum under {name}")
    return not bad, f"{len(PERMUTATION_ELEMENTS)} listed elements, sums under all of S3" + (f"; {bad}" if bad else "")


@criterion(5)
def test_conjugate_pair_closed_forms():
    n72 = n74 = 0
    bad = []
    for lam in range(7):
        for sigma in range(lam + 1):
            hw = solve_hw(CouplingQuery.make((lam, 0), (0, lam), (sigma, sigma)))
            seed = hw_chain_closed_form(lam, sigma, 0)
            if seed / hw[(lam, 0, sigma, sigma)] != 1:
                bad.append(("a=0", lam, sigma))
            for a in range(lam - sigma + 1):
                n72 += 1
                if hw_chain_closed_form(lam, sigma, a) != hw[(lam - a, a, sigma + a, sigma + a)]:
                    bad.append(("chain", lam, sigma, a))
            T = IrrepLabel(sigma, sigma)
            for nb in range(2 * sigma, -1, -1):
                p = 2 * sigma - nb
                for tI in su2_labels(T, nb):
                    tab = reduced_cg_all(hw, nb, Fraction(tI, 2))
                    for nu1p in range(lam + 1):
                        n1 = lam + sigma - nu1p - p
                        key = (nu1p, lam - nu1p, n1, n1, nb, tI)
                        if key not in tab.entries:
                            continue
                        n74 += 1
                        if reduced_cg_3f2(lam, sigma, nu1p, p, Fraction(tI, 2)) != tab[key]:
                            bad.append(("sum", lam, sigma, nu1p, p, tI))
    return not bad, f"chain {n72}, single sum {n74}" + (f"; {bad[:5]}" if bad else "")


@criterion(6)
def test_oracle_equivalence():
    n_free = n_mult = 0
    bad = []
    for L, R in _pairs(100):
        for e in decompose_product(L, R):
            tab = oracle_tables(L, R, e.irrep)
            if e.multiplicity == 1:
                n_free += 1
                _, it = couple(CouplingQuery(L, R, e.irrep))
                mine = {(f.bra1, f.bra2, f.target): f.value for f in it}
                ref = {k: v for k, v in tab.values.items() if not v.is_zero()}
                if differing(mine, ref):
                    bad.append((L, R, e.irrep))
                continue
            n_mult += 1
            ours = []
            for rho in range(1, e.multiplicity + 1):
                _, it = couple(CouplingQuery(L, R, e.irrep, rho))
                ours.append({(f.bra1, f.bra2, f.target): f.value for f in it})
            if span_rank(list(tab.raw) + ours) != e.multiplicity or span_rank(ours) != e.multiplicity:
                bad.append((L, R, e.irrep, "span"))
    return not bad, f"{n_free} multiplicity-free tables, {n_mult} multiple-copy spans" + (f"; {bad[:5]}" if bad else "")


def _su2_orthogonality(max_twice):
    bad = 0
    for t1 in range(max_twice + 1):
        for t2 in range(max_twice + 1):
            for tJ in range(abs(t1 - t2), t1 + t2 + 1, 2):
                for tJp in range(abs(t1 - t2), t1 + t2 + 1, 2):
                    for tM in range(-min(tJ, tJp), min(tJ, tJp) + 1, 2):
                        s = ZERO
                        for m1 in range(-t1, t1 + 1, 2):
                            if abs(tM - m1) <= t2:
                                s = s + cg2(t1, m1, t2, tM - m1, tJ, tM) * cg2(t1, m1, t2, tM - m1, tJp, tM)
                        bad += s != (1 if tJ == tJp else 0)
    return bad


def _unitarity_defects(L, R):
    rows: dict = {}
    for e in decompose_product(L, R):
        for rho in range(1, e.multiplicity + 1):
            q = CouplingQuery(L, R, e.irrep, rho if e.multiplicity > 1 else None)
            _, it = couple(q)
            for f in it:
                rows.setdefault((f.bra1, f.bra2), {})[(e.irrep, rho, f.target)] = f.value
    gram: dict = {}
    for row in rows.values():
        items = list(row.items())
        for i, (a, x) in enumerate(items):
            for b, y in items[i:]:
                gram[(a, b)] = gram.get((a, b), ZERO) + x * y
    bad = sum(v != (1 if a == b else 0) for (a, b), v in gram.items())
    bad += sum(sum((v * v for v in r.values()), ZERO) != 1 for r in rows.values())
    cols = {c for r in rows.values() for c in r}
    bad += len(cols) != L.dim * R.dim or len(rows) != L.dim * R.dim
    return bad


@criterion(7)
def test_property_suites():
    problems = []
    if _su2_orthogonality(6):
        problems.append("su(2) orthogonality")
    pairs = _pairs(400)
    unitary_bad = [(L, R) for L, R in pairs if _unitarity_defects(L, R)]
    if unitary_bad:
        problems.append(f"unitarity {unitary_bad[:5]}")
    n_routes = n_hw = 0
    for L, R in pairs:
        for e in decompose_product(L, R):
            if e.irrep.dim > 200:
                continue
            vecs = solve_hw_all(L, R, e.irrep)
            for v in vecs:
                n_hw += 1
                if annihilation_residual(v, "C12") or annihilation_residual(v, "C13"):
                    problems.append(f"annihilation {L} x {R} -> {e.irrep}")
            if e.multiplicity == 1:
                n_routes += 1
                w = solve_hw_all(L, R, e.irrep, direction="lower-right")[0]
                if differing(vecs[0].entries, w.entries):
                    problems.append(f"routes {L} x {R} -> {e.irrep}")
    detail = f"unitarity on {len(pairs)} products, {n_routes} route pairs, {n_hw} hw vectors annihilated"
    return not problems, detail + (f"; {problems[:5]}" if problems else "")


FAMILY_LEFT, FAMILY_RIGHT = IrrepLabel(75, 60), IrrepLabel(53, 0)
FAMILY_BRA = (47, 44, 27, 26)


@criterion(8)
def test_desk_scale_benchmark():
    t0 = time.perf_counter()
    dec = decompose_product(FAMILY_LEFT, FAMILY_RIGHT)
    t_dec = time.perf_counter() - t0
    problems = []
    if len(dec) != 1485 or not dec.is_multiplicity_free():
        problems.append(f"decomposition has {len(dec)} entries")
    if t_dec >= 10:
        problems.append(f"decomposition took {t_dec:.1f}s")
    summary = []
    worst = 0.0
    for k in (15, 33):
        fam = [e for e in dec if e.k == k]
        times = []
        for e in fam:
            t1 = time.perf_counter()
            hw = solve_hw(CouplingQuery(FAMILY_LEFT, FAMILY_RIGHT, e.irrep))
            nb = FAMILY_BRA[0] + FAMILY_BRA[2] - k
            v = reduced_cg(hw, FAMILY_BRA, nb, 35)
            times.append(time.perf_counter() - t1)
            if not isinstance(v, ExactReal):
                problems.append(f"no value for {e.irrep}")
        worst = max(worst, max(times))
        log.info("k=%d: %d targets, total %.2fs, max %.2fs", k, len(fam), sum(times), max(times))
        summary.append(f"k={k}: {len(fam)} targets, mean {sum(times) / len(times):.2f}s, max {max(times):.2f}s")
        if not fam:
            problems.append(f"empty family k={k}")
    if worst >= 90:
        problems.append(f"worst per-query {worst:.1f}s")
    return not problems, f"decompose {t_dec:.3f}s; " + "; ".join(summary) + (f"; {problems}" if problems else "")


INTERCHANGE_QUERIES = [
    ((3, 1), (2, 0), (3, 2)),
    ((3, 1), (2, 0), (2, 1)),
    ((1, 1), (1, 0), (0, 2)),
    ((1, 1), (2, 0), (2, 0)),
    ((4, 2), (2, 0), (3, 2)),
]


@criterion(9)
def test_interchange_relations():
    bad = []
    n = 0
    for P, lam, target in INTERCHANGE_QUERIES:
        qa = CouplingQuery.make(lam, P, target)
        qb = CouplingQuery.make(P, lam, target)
        ta, _ = couple(qa)
        tb, it = couple(qb)
        tx = interchange_order(ta)
        if differing(tx.entries, tb.entries):
            bad.append(("interchange", P, lam, target))
        for f in it:
            nq, (x, y, z), val = conjugate_relation(qb, f.bra1, f.bra2, f.target, f.value)
            n += 1
            if full_cg(nq, x, y, z) != val:
                bad.append(("conjugate", P, lam, target, str(f.target)))
                break
    return not bad, f"{len(INTERCHANGE_QUERIES)} queries, {n} conjugate pairs" + (f"; {bad}" if bad else "")


if __name__ == "__main__":
    # standalone: one line per criterion
    for fn in (test_worked_examples, test_adjoint_table, test_symmetric_two_table, test_permutation_table_and_weyl_sums,
               test_conjugate_pair_closed_forms, test_oracle_equivalence, test_property_suites,
               test_desk_scale_benchmark, test_interchange_relations):
        try:
            fn()
        except AssertionError:
            pass
