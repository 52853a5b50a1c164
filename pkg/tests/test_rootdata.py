import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soergelcalc.rootdata import (
    BadPrime,
    DatumMismatch,
    UnsupportedPreset,
    WeylCapExceeded,
    WeylGroup,
    build_root_datum,
    check_prime,
    enumerate_weyl,
    is_good_prime,
    parse_word,
    word_str,
)

from conftest import subword_products, symmetric_group_lengths

SMALL = ["A1", "A2", "A3", "B2", "C2", "G2", "B3", "C3", "GL2", "GL3"]
GROUP_ORDER = {"A1": 2, "A2": 6, "A3": 24, "B2": 8, "C2": 8, "G2": 12, "B3": 48, "C3": 48,
               "GL2": 2, "GL3": 6, "GL4": 24}


@pytest.fixture(scope="module")
def groups():
    return {p: WeylGroup(build_root_datum(p)) for p in SMALL}


def test_cartan_matrices():
    assert [list(r) for r in build_root_datum("A2").cartan] == [[2, -1], [-1, 2]]
    assert [list(r) for r in build_root_datum("G2").cartan] == [[2, -1], [-3, 2]]
    assert [list(r) for r in build_root_datum("B2").cartan] == [[2, -2], [-1, 2]]


def test_gl2():
    d = build_root_datum("GL2")
    assert d.rank == 2 and d.num_simple == 1
    assert np.array_equal(d.reflections_Y[0], np.array([[0, 1], [1, 0]]))


@pytest.mark.parametrize("preset", sorted(GROUP_ORDER))
def test_group_orders(preset):
    g = WeylGroup(build_root_datum(preset))
    assert len(g) == GROUP_ORDER[preset]
    assert g.longest_element().length == build_root_datum(preset).num_positive_roots


@pytest.mark.parametrize("preset,n", [("A2", 3), ("A3", 4), ("GL3", 3), ("GL4", 4)])
def test_type_a_lengths_match_inversions(preset, n):
    g = WeylGroup(build_root_datum(preset))
    assert sorted(x.length for x in g) == symmetric_group_lengths(n)


def test_enumeration_order():
    elts = enumerate_weyl(build_root_datum("A2"))
    assert [x.length for x in elts] == [0, 1, 1, 2, 2, 3]
    keys = [(x.length, x.word) for x in elts]
    assert keys == sorted(keys)
    assert [x.length for x in enumerate_weyl(build_root_datum("B2"))][-1] == 4
    assert [x.length for x in enumerate_weyl(build_root_datum("G2"))][-1] == 6


def test_spec_group_examples(groups):
    g = groups["A2"]
    s1 = g.element("s1")
    assert g.multiply(s1, s1) == g.identity
    w0 = g.longest_element()
    assert g.element("s1s2s1") == w0 == g.element("s2s1s2")
    assert w0.length == 3
    b = groups["B2"]
    assert b.invert(b.element("s1s2")) == b.element("s2s1")


def test_canonical_word_is_lex_least(groups):
    for g in groups.values():
        if len(g) > 48:
            continue
        for x in g:
            assert x.word == min(g.reduced_words(x))


@pytest.mark.parametrize("preset", ["A1", "A2", "A3", "B2", "C2", "G2", "B3", "C3", "GL3"])
def test_reduced_words_exhaustive(preset):
    g = WeylGroup(build_root_datum(preset))
    refl = build_root_datum(preset).reflections_Y
    for x in g:
        for word in g.reduced_words(x):
            assert len(word) == x.length
            m = np.eye(g.datum.rank, dtype=np.int64)
            for s in word:
                m = m @ refl[s]
            assert np.array_equal(m, x.matrix)


@pytest.mark.parametrize("preset", ["A2", "A3", "B2", "G2", "B3"])
def test_bruhat_against_all_reduced_words(preset):
    # subword test on every reduced word vs the single-word implementation
    g = WeylGroup(build_root_datum(preset))
    for y in g:
        words = g.reduced_words(y)
        below = set()
        for w in words[:3]:
            below |= subword_products(g, w)
        assert below == set(g.lower_interval(y))
        for x in g:
            assert g.bruhat_leq(x, y) == (x.index in below)


def test_bruhat_examples(groups):
    g = groups["A2"]
    assert all(g.bruhat_leq(g.identity, w) for w in g)
    assert not g.bruhat_leq(g.element("s1"), g.element("s2"))
    a3 = groups["A3"]
    assert a3.bruhat_leq(a3.element("s2"), a3.element("s2s1s3s2"))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_group_laws(preset, data):
    g = WeylGroup(build_root_datum(preset))
    i, j, k = (data.draw(st.integers(0, len(g) - 1)) for _ in range(3))
    x, y, z = g[i], g[j], g[k]
    assert g.multiply(x, g.invert(x)) == g.identity
    assert g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z))
    assert np.array_equal(g.multiply(x, y).matrix, x.matrix @ y.matrix)
    assert g.invert(x).length == x.length


def test_good_primes():
    assert not is_good_prime(build_root_datum("G2"), 3)
    assert is_good_prime(build_root_datum("G2"), 5)
    assert is_good_prime(build_root_datum("GL3"), 2)
    assert not is_good_prime(build_root_datum("B2"), 2)


def test_check_prime_rejections():
    with pytest.raises(BadPrime):
        check_prime(build_root_datum("G2"), 3)
    with pytest.raises(BadPrime):
        check_prime(build_root_datum("A2"), 4)
    # the reflection representation on coweights degenerates when l | det(Cartan)
    with pytest.raises(BadPrime):
        check_prime(build_root_datum("A2"), 3)
    check_prime(build_root_datum("GL3"), 3)
    check_prime(build_root_datum("A2"), 2)


def test_presets_and_errors():
    for bad in ["", "X2", "A0", "G3", "B1", "D3x"]:
        with pytest.raises(UnsupportedPreset):
            build_root_datum(bad)
    with pytest.raises(WeylCapExceeded):
        WeylGroup(build_root_datum("A3"), max_size=10)
    a, b = WeylGroup(build_root_datum("A2")), WeylGroup(build_root_datum("A2"))
    with pytest.raises(DatumMismatch):
        a.multiply(a[1], b[1])


def test_delta_pairs_to_one():
    for p in SMALL:
        d = build_root_datum(p)
        for s in range(d.num_simple):
            assert d.pairing(s, d.delta(s)) == 1


def test_word_roundtrip():
    assert word_str(()) == "e"
    assert parse_word("s1s3s2") == (0, 2, 1)
    assert parse_word(word_str((2, 0, 1))) == (2, 0, 1)
    with pytest.raises(ValueError):
        parse_word("s1x")
