from fractions import Fraction

import pytest

from oracles import differing, oracle_hw
from reference_tables import adjoint_pair, times_symmetric_two
from su3cg.engine import full_cg
from su3cg.exact import ExactReal
from su3cg.fock import adjoint_intertwiner, project_matrix_element
from su3cg.hw import (
    ConventionUnavailable,
    CouplingQuery,
    GradeNotZero,
    MissingSource,
    annihilation_residual,
    clear_cache,
    convention_key,
    hw_k0_closed_form,
    hw_keys,
    hw_lambda0_chains,
    recursion_step,
    solve_hw,
    solve_hw_all,
)
from su3cg.rep import IrrepLabel, NotInProduct, decompose_product, enumerate_states, highest_weight

PRODUCTS = [
    ((1, 0), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (1, 0)), ((1, 0), (1, 1)), ((2, 1), (1, 0)),
    ((1, 1), (2, 0)), ((2, 0), (2, 0)), ((3, 0), (0, 3)), ((1, 2), (2, 0)), ((2, 0), (0, 2)),
    ((2, 2), (1, 0)), ((2, 1), (1, 1)), ((3, 1), (2, 0)), ((0, 3), (3, 0)),
]
CASES = [
    (IrrepLabel(*a), IrrepLabel(*b), e.irrep)
    for a, b in PRODUCTS
    for e in decompose_product(a, b)
    if e.multiplicity == 1
]


@pytest.mark.parametrize("left,right,target", CASES, ids=lambda x: str(x))
def test_both_recursions_match_oracle(left, right, target):
    ref = oracle_hw(left, right, target)
    for direction in ("lower-left", "lower-right"):
        hw = solve_hw_all(left, right, target, direction=direction)[0]
        assert not differing(ref, hw.entries)
        assert hw.norm2() == 1
        assert not annihilation_residual(hw, "C12")
        assert not annihilation_residual(hw, "C13")


@pytest.mark.parametrize("left,right,target", CASES, ids=lambda x: str(x))
def test_closed_forms_match_oracle(left, right, target):
    q = CouplingQuery(left, right, target)
    ref = oracle_hw(left, right, target)
    if q.k == 0:
        assert not differing(ref, hw_k0_closed_form(q).entries)
    if right.mu == 0:
        assert not differing(ref, hw_lambda0_chains(q).entries)


def test_k0_closed_form_requires_grade_zero():
    with pytest.raises(GradeNotZero):
        hw_k0_closed_form(CouplingQuery.make((1, 1), (1, 1), (0, 0)))


def test_not_in_product():
    with pytest.raises(NotInProduct):
        solve_hw_all((1, 0), (1, 0), (0, 0))


def test_times_symmetric_two_at_5_3():
    for target, rows in times_symmetric_two(5, 3).items():
        hw = solve_hw(CouplingQuery.make((5, 3), (2, 0), target))
        for key, val in rows:
            assert hw[key] == val
        assert hw.norm2() == 1


def test_single_step_ratio():
    # one lower-left step from the seed of (p,q) x (2,0) -> (p,q+1)
    p, q = 4, 2
    query = CouplingQuery.make((p, q), (2, 0), (p, q + 1))
    hw = solve_hw(query)
    keys = hw_keys(query)
    seed = max(keys)
    assert seed == (p + q, q, 1, 1)
    step = recursion_step(query, {seed: ExactReal(1)}, (p + q - 1, q + 1, 2, 0))
    assert step == -ExactReal.sqrt(Fraction(2, p))
    assert hw[(p + q - 1, q + 1, 2, 0)] / hw[seed] == step


def test_recursion_step_missing_source():
    query = CouplingQuery.make((4, 2), (2, 0), (4, 3))
    with pytest.raises(MissingSource):
        recursion_step(query, {}, (5, 3, 2, 0))


def test_convention_key_positive():
    for left, right, target in CASES:
        q = CouplingQuery(left, right, target)
        assert solve_hw(q)[convention_key(q)].sign() > 0


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_adjoint_copies_both_routes(s):
    r1, r2 = adjoint_pair(s)
    for direction in ("lower-left", "lower-right"):
        v1, v2 = solve_hw_all((1, 1), (s, s), (s, s), direction=direction)
        assert v1.convention == v2.convention == "generator"
        assert all(v1[k] == x for k, x in r1.items())
        assert all(v2[k] == x for k, x in r2.items())
        assert v1.norm2() == v2.norm2() == 1
        dot = sum((v1[k] * v2[k] for k in v1.entries), ExactReal())
        assert dot == 0


@pytest.mark.parametrize("s", [1, 2])
def test_first_copy_carries_generator_matrix_elements(s):
    """<hw| sum M_ij C_ij |t> over the adjoint basis is a multiple of the rho=1 column."""
    T = IrrepLabel(s, s)
    hw = highest_weight(T)
    phi = adjoint_intertwiner()
    gen = {}
    for b, m in phi.items():
        for t in enumerate_states(T):
            tot = ExactReal()
            for i in range(3):
                for j in range(3):
                    if not m[i][j].is_zero():
                        tot += m[i][j] * project_matrix_element(hw, i + 1, j + 1, t)
            if not tot.is_zero():
                gen[(b, t)] = tot
    n_gen = sum((v * v for v in gen.values()), ExactReal())
    for rho in (1, 2):
        q = CouplingQuery(IrrepLabel(1, 1), T, T, rho)
        col = {(b, t): full_cg(q, b, t, hw) for b in phi for t in enumerate_states(T)}
        dot = sum((gen[k] * col[k] for k in gen), ExactReal())
        if rho == 1:
            assert dot * dot == n_gen
        else:
            assert dot == 0


def test_other_multiplicity_is_tagged():
    vs = solve_hw_all((2, 1), (1, 2), (1, 1))
    assert len(vs) == 2
    assert {v.convention for v in vs} == {"lexicographic"}
    with pytest.raises(ConventionUnavailable):
        solve_hw_all((2, 1), (1, 2), (1, 1), strict=True)


def test_solve_hw_cache_and_rho():
    clear_cache()
    q = CouplingQuery.make((1, 1), (1, 1), (1, 1))
    both = solve_hw(q)
    assert isinstance(both, list) and len(both) == 2
    assert solve_hw(CouplingQuery.make((1, 1), (1, 1), (1, 1), rho=2)) is both[1]
    with pytest.raises(ValueError):
        solve_hw(CouplingQuery.make((1, 1), (1, 1), (1, 1), rho=3))
