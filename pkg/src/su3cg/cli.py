"""Command-line entry point: ``su3cg <command> ...``.

State labels are integers only: occupations nu1 nu2 nu3 followed by 2I.
Exit status 0 on success, 1 on a domain error, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .exact import ExactReal, MalformedHalfInt, to_twice
from .rep import IrrepLabel, NotInProduct, StateLabel, decompose_product, enumerate_states, su2_labels

CSV_FIELDS = ["p2", "q2", "k", "nu1p", "2Jp", "n1p", "2Inp", "nbar1", "2Ibar", "value_exact", "value_decimal"]

# benchmark family: (75,60) x (53,0) with fixed product multiplets and target I = 35
FAMILY_LEFT = (75, 60)
FAMILY_RIGHT = (53, 0)
FAMILY_BRA = (47, 44, 27, 26)
FAMILY_TI = 70


class UsageError(Exception):
    pass


def _fmt(v: ExactReal, style: str) -> str:
    if style == "latex":
        return v.to_latex()
    if style == "decimal":
        return f"~{v.to_decimal()}"
    return str(v)


def _state(irr: IrrepLabel, vals) -> StateLabel:
    if vals is None:
        return None
    n1, n2, n3, tI = vals
    st = StateLabel(irr, (n1, n2, n3), tI)
    if not st.is_valid():
        raise NotInProduct(f"{st} is not a state of {irr}")
    return st


def _half(text: str) -> int:
    return to_twice(Fraction(text))


# ---------------------------------------------------------------------------
# subcommands


def cmd_su2(a) -> int:
    from .wigner import clebsch_gordan, wigner_6j, wigner_9j

    vals = [Fraction(x) for x in a.args]
    need = {"cg": 6, "6j": 6, "9j": 9}[a.kind]
    if len(vals) != need:
        raise UsageError(f"su2 {a.kind} takes {need} arguments")
    fn = {"cg": clebsch_gordan, "6j": wigner_6j, "9j": wigner_9j}[a.kind]
    print(_fmt(fn(*vals), a.format))
    return 0


def cmd_decompose(a) -> int:
    dec = decompose_product((a.p1, a.q1), (a.l, a.m))
    if a.count:
        print(len(dec))
        return 0
    if a.format == "json":
        print(json.dumps([{"p2": e.irrep.lam, "q2": e.irrep.mu, "k": e.k, "multiplicity": e.multiplicity} for e in dec]))
        return 0
    for e in dec:
        print(f"{e.irrep} k={e.k} mult={e.multiplicity}")
    return 0


def cmd_hw(a) -> int:
    from .hw import CouplingQuery, solve_hw

    q = CouplingQuery.make((a.p1, a.q1), (a.l, a.m), (a.p2, a.q2), a.rho)
    if a.rho is None and q.multiplicity > 1:
        q = CouplingQuery.make((a.p1, a.q1), (a.l, a.m), (a.p2, a.q2), 1)
    hw = solve_hw(q, direction=a.direction)
    rows = [(key, v) for key, v in hw.items()]
    if a.json:
        print(json.dumps({
            "left": [a.p1, a.q1], "right": [a.l, a.m], "target": [a.p2, a.q2], "k": hw.k, "rho": hw.rho,
            "convention": hw.convention,
            "entries": [{"key": list(key), "value": str(v), "terms": v.to_json()["terms"]} for key, v in rows],
        }))
        return 0
    print(f"# k={hw.k} rho={hw.rho} convention={hw.convention}; keys (nu1,2J,n1,2In)")
    for key, v in rows:
        print(f"{key}\t{_fmt(v, a.format)}")
    return 0


def _csv_row(q, key, v: ExactReal) -> dict:
    nu1p, tJp, n1p, tInp, nb, tb = key
    return dict(zip(CSV_FIELDS, (q.target.lam, q.target.mu, q.k, nu1p, tJp, n1p, tInp, nb, tb, str(v), v.to_decimal())))


def _emit_rows(rows, style: str) -> None:
    if style == "csv":
        w = csv.DictWriter(sys.stdout, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    elif style == "json":
        print(json.dumps(list(rows)))
    else:
        for r in rows:
            print(" ".join(str(r[f]) for f in CSV_FIELDS[:9]), r["value_exact"])


def cmd_cg(a) -> int:
    from .engine import couple, full_cg, reduced_cg_all
    from .hw import CouplingQuery, solve_hw

    L, R, T = IrrepLabel(a.p1, a.q1), IrrepLabel(a.l, a.m), IrrepLabel(a.p2, a.q2)
    rho = a.rho
    mult = decompose_product(L, R).multiplicity(T)
    if not mult:
        raise NotInProduct(f"{T} is not in {L} x {R}")
    if rho is None:
        rho = 1 if mult > 1 else None
    q = CouplingQuery(L, R, T, rho)
    if a.bra1 or a.bra2:
        if not (a.bra1 and a.bra2 and a.state):
            raise UsageError("--bra1, --bra2 and --state go together")
        v = full_cg(q, _state(L, a.bra1), _state(R, a.bra2), _state(T, a.state))
        print(_fmt(v, a.format) if a.format in ("exact", "latex", "decimal") else json.dumps({"value": str(v)}))
        return 0
    hw = solve_hw(q)
    if a.state:
        t = _state(T, a.state)
        table = reduced_cg_all(hw, t.nu[0], Fraction(t.tI, 2))
    elif a.all:
        table, _ = couple(q, hw)
    else:
        t = enumerate_states(T)[0]
        table = reduced_cg_all(hw, t.nu[0], Fraction(t.tI, 2))
    rows = [_csv_row(hw.query, key, v) for key, v in sorted(table.entries.items(), key=lambda kv: (-kv[0][4], -kv[0][5], tuple(-x for x in kv[0][:4])))]
    _emit_rows(rows, a.format)
    return 0


def cmd_rme(a) -> int:
    from .rme import rme2_from_hw, rme2_general

    irr = IrrepLabel(a.lam, a.mu)
    if a.general:
        tk, tJfrom = a.general
        v = rme2_general(irr, a.p, tk, tJfrom, a.tJ)
    else:
        v = rme2_from_hw(irr, a.p, a.tJ)
    print(_fmt(v, a.format))
    return 0


def cmd_weyl(a) -> int:
    from .engine import full_cg
    from .hw import CouplingQuery
    from .symmetry import weyl_relate

    L, R, T = IrrepLabel(a.p1, a.q1), IrrepLabel(a.l, a.m), IrrepLabel(a.p2, a.q2)
    q = CouplingQuery(L, R, T, a.rho)
    b1, b2, t = _state(L, a.bra1), _state(R, a.bra2), _state(T, a.state)
    total = ExactReal()
    for c, (x, y, z) in weyl_relate(q, a.perm, b1, b2, t):
        v = full_cg(q, x, y, z)
        total = total + c * v
        print(f"{_fmt(c, a.format)}\t{x}\t{y}\t{z}\t{_fmt(v, a.format)}")
    direct = full_cg(q, b1, b2, t)
    print(f"expansion {_fmt(total, a.format)}")
    print(f"direct    {_fmt(direct, a.format)}")
    return 0 if total == direct else 1


def cmd_appb(a) -> int:
    from .conjugate_pair import hw_chain_closed_form, reduced_cg_3f2
    from .engine import reduced_cg
    from .hw import CouplingQuery, solve_hw

    lam, sig = a.lam, a.sigma
    q = CouplingQuery.make((lam, 0), (0, lam), (sig, sig))
    hw = solve_hw(q)
    ok = True
    if a.state:
        nu1p, p, tI = a.state
        v = reduced_cg_3f2(lam, sig, nu1p, p, Fraction(tI, 2))
        n1 = lam + sig - nu1p - p
        w = reduced_cg(hw, (nu1p, lam - nu1p, n1, n1), 2 * sig - p, Fraction(tI, 2))
        ok = v == w
        print(f"closed  {_fmt(v, a.format)}")
        print(f"general {_fmt(w, a.format)}")
    else:
        for k in range(lam - sig + 1):
            v = hw_chain_closed_form(lam, sig, k)
            w = hw[(lam - k, k, sig + k, sig + k)]
            ok &= v == w
            print(f"a={k}\t{_fmt(v, a.format)}\t{'ok' if v == w else 'MISMATCH ' + _fmt(w, a.format)}")
    return 0 if ok else 1


def cmd_oracle(a) -> int:
    from .engine import couple
    from .fock import oracle_tables
    from .hw import CouplingQuery

    bad = total = 0
    irreps = [IrrepLabel(x, y) for x in range(a.max_label + 1) for y in range(a.max_label + 1)]
    for L in irreps:
        for R in irreps:
            if L.dim * R.dim > a.max_dim:
                continue
            for e in decompose_product(L, R):
                if e.multiplicity > 1:
                    continue
                total += 1
                tab = oracle_tables(L, R, e.irrep, max_product_dim=a.max_dim)
                _, it = couple(CouplingQuery(L, R, e.irrep))
                mine = {(f.bra1, f.bra2, f.target): f.value for f in it}
                keys = set(mine) | {k for k, v in tab.values.items() if not v.is_zero()}
                n = sum(mine.get(k, ExactReal()) != tab.values.get(k, ExactReal()) for k in keys)
                if n:
                    bad += 1
                    print(f"MISMATCH {L} x {R} -> {e.irrep}: {n} entries")
    print(f"{total - bad}/{total} tables agree")
    return 0 if not bad else 1


def _family_row(args):
    """One benchmark-family reduced coefficient and its wall time."""
    from .engine import reduced_cg
    from .hw import CouplingQuery, solve_hw

    (p1, q1), (l, m), (p2, q2), k, bra, tI = args
    t0 = time.perf_counter()
    q = CouplingQuery.make((p1, q1), (l, m), (p2, q2))
    nb = bra[0] + bra[2] - k
    key = tuple(bra) + (nb, tI)
    try:
        hw = solve_hw(q)
        if tI not in su2_labels(q.target, nb):
            raise NotInProduct("no such target multiplet")
        v = reduced_cg(hw, bra, nb, Fraction(tI, 2))
        row = _csv_row(q, key, v)
    except (ValueError, ArithmeticError) as exc:
        row = dict(zip(CSV_FIELDS, (p2, q2, k, *key, "", f"error: {type(exc).__name__}")))
    return row, time.perf_counter() - t0


def batch_table(left, right, ks=None, bra=FAMILY_BRA, tI=FAMILY_TI, threads: int = 1):
    """Yield (row, seconds) for every target of left x right with grade in ``ks``."""
    dec = decompose_product(left, right)
    jobs = [(tuple(left), tuple(right), (e.irrep.lam, e.irrep.mu), e.k, tuple(bra), tI) for e in dec if ks is None or e.k in ks]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            yield from ex.map(_family_row, jobs)
    else:
        for j in jobs:
            yield _family_row(j)


def cmd_bench(a) -> int:
    left, right = tuple(a.left), tuple(a.right)
    t0 = time.perf_counter()
    dec = decompose_product(left, right)
    t_dec = time.perf_counter() - t0
    ks = None if a.k == ["all"] else {int(x) for x in a.k}
    per_k: dict = {}
    worst = 0.0
    rows = []
    for row, dt in batch_table(left, right, ks, tuple(a.bra), a.tI, a.threads):
        rows.append(row)
        per_k.setdefault(row["k"], []).append(dt)
        worst = max(worst, dt)
    if a.csv:
        _emit_rows(rows, "csv")
    if not a.quiet:
        err = sys.stderr
        print(f"# decompose {left} x {right}: {len(dec)} entries in {t_dec:.3f}s", file=err)
        for k in sorted(per_k):
            ts = per_k[k]
            print(f"# k={k}: {len(ts)} targets, total {sum(ts):.2f}s, max {max(ts):.2f}s", file=err)
        print(f"# worst per-query time {worst:.2f}s", file=err)
    return 0


# ---------------------------------------------------------------------------


def _irrep_args(p, *names):
    for n in names:
        p.add_argument(n, type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="su3cg", description="Exact SU(3) Clebsch-Gordan coefficients")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes for batch runs")
    sub = ap.add_subparsers(dest="command", required=True)
    fmt = dict(choices=["exact", "latex", "decimal", "csv", "json"], default="exact")

    p = sub.add_parser("su2", help="su(2) CG, 6j and 9j symbols")
    p.add_argument("kind", choices=["cg", "6j", "9j"])
    p.add_argument("args", nargs="+")
    p.add_argument("--format", choices=["exact", "latex", "decimal"], default="exact")
    p.set_defaults(fn=cmd_su2)

    p = sub.add_parser("decompose", help="tensor product decomposition")
    _irrep_args(p, "p1", "q1", "l", "m")
    p.add_argument("--count", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("hw", help="reduced coefficients of the target highest weight")
    _irrep_args(p, "p1", "q1", "l", "m", "p2", "q2")
    p.add_argument("--rho", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--direction", choices=["lower-left", "lower-right"], default="lower-left")
    p.add_argument("--format", choices=["exact", "latex", "decimal"], default="exact")
    p.set_defaults(fn=cmd_hw)

    p = sub.add_parser("cg", help="reduced tables or single full coefficients")
    _irrep_args(p, "p1", "q1", "l", "m", "p2", "q2")
    p.add_argument("--rho", type=int)
    p.add_argument("--state", type=int, nargs=4, metavar=("NU1", "NU2", "NU3", "2I"))
    p.add_argument("--bra1", type=int, nargs=4, metavar=("NU1", "NU2", "NU3", "2J"))
    p.add_argument("--bra2", type=int, nargs=4, metavar=("N1", "N2", "N3", "2I"))
    p.add_argument("--all", action="store_true")
    p.add_argument("--format", **fmt)
    p.set_defaults(fn=cmd_cg)

    p = sub.add_parser("rme", help="reduced matrix elements of the lowering tensors")
    _irrep_args(p, "lam", "mu", "p", "tJ")
    p.add_argument("--general", type=int, nargs=2, metavar=("2K", "2JFROM"),
                   help="matrix element of T^K from multiplet (p, JFROM) instead of from the hw")
    p.add_argument("--format", choices=["exact", "latex", "decimal"], default="exact")
    p.set_defaults(fn=cmd_rme)

    p = sub.add_parser("weyl-check", help="expand a CG through permuted states")
    _irrep_args(p, "p1", "q1", "l", "m", "p2", "q2")
    p.add_argument("--perm", default="P12", choices=["e", "P12", "P13", "P23", "P123", "P132"])
    p.add_argument("--rho", type=int)
    p.add_argument("--state", type=int, nargs=4, required=True)
    p.add_argument("--bra1", type=int, nargs=4, required=True)
    p.add_argument("--bra2", type=int, nargs=4, required=True)
    p.add_argument("--format", choices=["exact", "latex", "decimal"], default="exact")
    p.set_defaults(fn=cmd_weyl)

    p = sub.add_parser("appb", help="(lambda,0) x (0,lambda) closed forms against the general route")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--state", type=int, nargs=3, metavar=("NU1P", "P", "2I"))
    p.add_argument("--format", choices=["exact", "latex", "decimal"], default="exact")
    p.set_defaults(fn=cmd_appb)

    p = sub.add_parser("oracle-check", help="compare engine tables with the oscillator oracle")
    p.add_argument("--max-dim", type=int, default=100)
    p.add_argument("--max-label", type=int, default=4)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("bench", help="decomposition and family timing")
    p.add_argument("--left", type=int, nargs=2, default=list(FAMILY_LEFT))
    p.add_argument("--right", type=int, nargs=2, default=list(FAMILY_RIGHT))
    p.add_argument("--k", nargs="+", default=["15", "33"], help="grades to run, or 'all'")
    p.add_argument("--bra", type=int, nargs=4, default=list(FAMILY_BRA), metavar=("NU1P", "2JP", "N1P", "2INP"))
    p.add_argument("--tI", type=int, default=FAMILY_TI)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--quiet", action="store_true", help="suppress the timing footer")
    p.set_defaults(fn=cmd_bench)
    return ap


def _protect_negatives(argv: list) -> list:
    """Let ``su2`` take negative projections such as -1/2 as positionals."""
    if "su2" not in argv:
        return argv
    i = argv.index("su2")
    head, rest = argv[: i + 1], argv[i + 1 :]
    opts = []
    while "--format" in rest:
        j = rest.index("--format")
        opts += rest[j : j + 2]
        del rest[j : j + 2]
    if not rest:
        return head + opts
    return head + opts + rest[:1] + ["--"] + rest[1:]


def run(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    a = ap.parse_args(_protect_negatives(argv))
    try:
        return a.fn(a)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError, MalformedHalfInt) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
