import pytest

from soergelcalc.charcalc import (
    calibration_check,
    dumps,
    int_table_csv,
    pairing_identity_check,
    self_duality_check,
    stalk_csv,
    stalk_json,
    symmetry_check,
)
from soergelcalc.laurent import ONE, V, LaurentPoly
from soergelcalc.linalg import CoefRing

Q = CoefRing.rationals()


def test_a1_tables(engine):
    r = engine.results("A1", Q)
    g = r.mult.weyl
    e, s = g.element("e").index, g.element("s1").index
    assert r.homs.ungraded(e, e) == 1
    assert r.homs.ungraded(s, s) == 2
    assert r.stalks.hpoly(e, s) == V
    assert r.mult.tilt[(s, e)] == 1
    comp = {k: v for k, v in r.mult.comp.items()}
    assert comp == {(e, e): 1, (s, s): 1, (s, e): 1}
    assert r.mult.euler == {(e, e): 1, (s, s): 1, (s, e): -1}


@pytest.mark.parametrize("preset,ring", [
    ("A2", CoefRing.rationals()), ("B2", CoefRing.prime_field(3)), ("B2", CoefRing.local_integers(3)),
    ("G2", CoefRing.rationals()),
])
def test_identities(engine, preset, ring):
    r = engine.results(preset, ring)
    assert pairing_identity_check(r.stalks, r.homs)["pass"]
    assert self_duality_check(r.stalks)["pass"]
    assert symmetry_check(r.stalks)["pass"]
    assert r.mult.reports["tilting"]["pass"]
    assert r.mult.reports["euler_inverse"]["pass"]
    g = r.mult.weyl
    for w in range(len(g)):
        assert r.stalks.hpoly(w, w) == ONE
        assert r.mult.comp[(w, w)] == 1
        for v in range(len(g)):
            if not g.bruhat_matrix[v, w]:
                assert r.stalks.hpoly(v, w).is_zero()
                assert (w, v) not in r.mult.comp
            assert r.stalks.stalk(v, w) == r.stalks.hpoly(v, w).eval_at_one()


@pytest.mark.parametrize("preset", ["A2", "B2", "G2"])
def test_char0_calibration(engine, preset):
    r = engine.results(preset, Q)
    assert calibration_check(r.stalks, engine.kl(preset))["pass"]


def test_a2_w0_stalk_at_identity(engine):
    r = engine.results("A2", Q)
    assert r.stalks.stalk(0, len(r.mult.weyl) - 1) == 1


def test_calibration_catches_mismatch(engine):
    r = engine.results("A2", Q)
    kl = engine.kl("A2")
    saved = r.stalks.h[(0, 5)]
    try:
        r.stalks.h[(0, 5)] = LaurentPoly({3: 2})
        assert not calibration_check(r.stalks, kl)["pass"]
        assert not pairing_identity_check(r.stalks, r.homs)["pass"]
    finally:
        r.stalks.h[(0, 5)] = saved


@pytest.mark.parametrize("preset,ell", [("A2", 5), ("B2", 3)])
def test_decomposition_matrix(engine, preset, ell):
    dec = engine.decomposition(preset, ell)
    n = len(dec.weyl)
    assert all(dec.E[(w, w)] == 1 for w in range(n))
    assert all(v >= 0 for v in dec.E.values())
    assert dec.T == dec.E
    assert all(r["pass"] for r in dec.reports.values())
    assert "not independently computed" in " ".join(str(v) for v in dec.provenance.values())


def test_emitters_are_deterministic(engine):
    r = engine.results("A2", CoefRing.prime_field(5))
    a = dumps(stalk_json(r.stalks))
    assert a == dumps(stalk_json(r.stalks)) and a.endswith("\n")
    assert stalk_csv(r.stalks).splitlines()[0] == "x,w,low,coeffs,ungraded"
    csv_tilt = int_table_csv(r.mult.weyl, r.mult.tilt, ("w", "v", "tilt"))
    assert csv_tilt.splitlines()[0] == "w,v,tilt"
    assert len(csv_tilt.splitlines()) == len(r.mult.tilt) + 1
