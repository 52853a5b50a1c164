import numpy as np
import pytest

from soergelcalc.coinvariant import build_coinvariants
from soergelcalc.laurent import ONE, V, V_INV, LaurentPoly
from soergelcalc.linalg import CoefRing
from soergelcalc.rootdata import WeylGroup, build_root_datum
from soergelcalc.soergel import (
    GradedCModule,
    IndecomposableTable,
    PeelError,
    bs_extend,
    bs_module,
    build_indecomposables,
    certify_module,
    decompose,
    direct_sum,
    graded_hom,
    isomorphic_to_indecomposable,
    peel_summand,
    shift,
    unit_module,
)

Q = CoefRing.rationals()


@pytest.fixture(scope="module")
def a2():
    d = build_root_datum("A2")
    g = WeylGroup(d)
    C = build_coinvariants(d, Q, g)
    return d, g, C


@pytest.fixture(scope="module")
def a2_table(a2):
    d, g, C = a2
    return build_indecomposables(d, Q, g, C)


def test_unit_module(a2):
    _, _, C = a2
    U = unit_module(C)
    assert U.rank == 1 and U.graded_rank() == ONE
    assert all(not np.any(a != 0) for a in U.actions)
    assert graded_hom(U, U).graded_rank == ONE


def test_shift_convention(a2):
    _, _, C = a2
    U = unit_module(C)
    assert shift(U, 1).graded_rank() == V_INV
    M = bs_module((0, 1), C)
    assert shift(M, 0).same_as(M)
    assert shift(shift(M, 2), -3).same_as(shift(M, -1))


def test_bs_extend_of_unit(a2):
    d, _, C = a2
    for s in range(d.num_simple):
        B = bs_extend(unit_module(C), s, d)
        assert B.rank == 2 and B.graded_rank() == V + V_INV
        # h . (1 (x) 1) = <alpha_s, h> delta_s (x) 1
        for j in range(d.rank):
            col = [int(x) for x in B.actions[j][:, 0]]
            assert col == [0, d.simple_roots[s][j]]
        B.validate(C)


def test_bs_module_ranks(a2):
    _, _, C = a2
    assert bs_module((), C).same_as(unit_module(C))
    assert bs_module((0, 0), C).graded_rank() == (V + V_INV) * (V + V_INV)
    M = bs_module((0, 1, 0), C)
    assert M.rank == 8
    assert M.graded_rank().is_bar_invariant()


def test_hom_examples(a2):
    _, _, C = a2
    U, B = unit_module(C), bs_module((0,), C)
    assert graded_hom(U, B).graded_rank == V
    assert graded_hom(B, B).rank == 2
    end0 = graded_hom(B, B).basis.get(0, [])
    assert len(end0) == 1


def test_peel_examples(a2, a2_table):
    _, g, C = a2
    B = bs_module((0,), C)
    for n in range(-2, 3):
        rem, ok = peel_summand(B, unit_module(C), n)
        assert not ok
    Ds = a2_table.modules[g.element("s1").index]
    Dt = a2_table.modules[g.element("s2s1").index]
    M = direct_sum(Dt, shift(Ds, 1))
    rem, ok = peel_summand(M, Ds, 1)
    assert ok and isomorphic_to_indecomposable(rem, Dt)
    with pytest.raises(PeelError):
        peel_summand(M, Ds, 1, budget=0)


def test_bs_ss_splits(a2, a2_table):
    _, g, C = a2
    rec = decompose(bs_module((0, 0), C), a2_table)
    s = g.element("s1").index
    assert sorted(rec.summands) == [(s, -1, 1), (s, 1, 1)]
    assert rec.graded_rank_ok


def test_dw0_is_regular(a2_table, a2):
    _, g, _ = a2
    w0 = g.longest_element()
    expect = sum((LaurentPoly.monomial(2 * x.length - w0.length) for x in g), LaurentPoly())
    assert a2_table.modules[w0.index].graded_rank() == expect


def test_a1_table():
    d = build_root_datum("A1")
    g = WeylGroup(d)
    C = build_coinvariants(d, Q, g)
    t = build_indecomposables(d, Q, g, C)
    assert t.modules[0].same_as(unit_module(C))
    assert t.modules[1].same_as(bs_module((0,), C))


@pytest.mark.parametrize("preset,ring", [
    ("A2", CoefRing.rationals()), ("B2", CoefRing.prime_field(3)), ("G2", CoefRing.prime_field(5)),
])
def test_graded_ranks_follow_kl(engine, preset, ring):
    t = engine.indecomposables(preset, ring)
    kl = engine.kl(preset)
    g = t.weyl
    for w in range(len(g)):
        expect = LaurentPoly()
        for x in range(len(g)):
            expect = expect + kl.hpoly(x, w) * LaurentPoly.monomial(-g[x].length)
        if ring.kind == "Q":
            assert t.modules[w].graded_rank() == expect
        assert t.certificates[w]["local"]


def test_integral_reduction(engine):
    O, F = CoefRing.local_integers(3), CoefRing.prime_field(3)
    tO, tF = engine.indecomposables("B2", O), engine.indecomposables("B2", F)
    for w, M in tO.modules.items():
        red = M.base_change(F)
        assert red.graded_rank() == M.graded_rank()
        assert isomorphic_to_indecomposable(red, tF.modules[w])
        assert certify_module(M)["local"]
    assert unit_module(tO.C).base_change(F).same_as(unit_module(tF.C))


def test_module_json_roundtrip(a2_table, a2):
    d, g, C = a2
    M = a2_table.modules[len(g) - 1]
    back = GradedCModule.from_json_obj(M.to_json_obj())
    assert back.same_as(M)
    t2 = IndecomposableTable.from_json_obj(a2_table.to_json_obj(), d, g, C)
    assert all(t2.modules[w].same_as(a2_table.modules[w]) for w in a2_table.modules)


def test_validate_rejects_broken_module(a2):
    _, _, C = a2
    M = bs_module((0, 1), C)
    bad = GradedCModule(M.ring, M.degrees.copy(), [a.copy() for a in M.actions])
    bad.actions[0][-1, 0] = bad.actions[0][-1, 0] + 1
    assert not all(bad.check(C).values())


def test_budget_is_enforced(a2):
    d, g, C = a2
    with pytest.raises(PeelError) as exc:
        build_indecomposables(d, Q, g, C, budget_peel=0)
    assert exc.value.budget
