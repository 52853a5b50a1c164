import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from soergelcalc import _kernels
from soergelcalc._kernels import DISABLE_ENV, rref_mod, rref_mod_numba, rref_mod_numpy
from soergelcalc.linalg import is_prime

from conftest import frac_rank

PRIMES = [2, 3, 5, 7, 101, 2147483629]


def is_rref(r, piv, p):
    for i, c in enumerate(piv):
        if r[i, c] != 1 or np.count_nonzero(r[:, c]) != 1:
            return False
        if np.any(r[i, :c] != 0):
            return False
    return list(piv) == sorted(piv) and np.all((r >= 0) & (r < p))


@settings(max_examples=60, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 9), st.integers(1, 9)), elements=st.integers(-50, 50)),
       st.sampled_from(PRIMES))
def test_numba_and_numpy_agree(a, p):
    r1, p1 = rref_mod_numpy(a, p)
    r2, p2 = rref_mod_numba(a, p)
    assert np.array_equal(r1, r2)
    assert np.array_equal(p1, p2)
    assert is_rref(r1, p1, p)


@settings(max_examples=40, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 7), st.integers(1, 7)), elements=st.integers(-5, 5)))
def test_rank_matches_rational_rank_for_large_prime(a):
    # entries are tiny, so the big prime is lucky for every such matrix
    _, piv = rref_mod(a, 2147483629)
    assert len(piv) == frac_rank(a.tolist())


def test_row_space_preserved():
    rng = np.random.default_rng(1)
    a = rng.integers(0, 7, size=(6, 9))
    r, piv = rref_mod(a, 7)
    # every original row is a combination of the pivot rows with its pivot entries as weights
    for row in a % 7:
        comb = (row[piv] @ r) % 7
        assert np.array_equal(comb, row)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv(DISABLE_ENV, "1")
    assert not _kernels.numba_enabled()
    called = {}
    orig = _kernels.rref_mod_numpy

    def spy(a, p):
        called["numpy"] = True
        return orig(a, p)

    monkeypatch.setattr(_kernels, "rref_mod_numpy", spy)
    rref_mod(np.eye(3, dtype=np.int64), 5)
    assert called


def test_numba_enabled_by_default(monkeypatch):
    monkeypatch.delenv(DISABLE_ENV, raising=False)
    assert _kernels.numba_enabled()


def test_modulus_guard_and_empty():
    with pytest.raises(ValueError):
        rref_mod(np.eye(2, dtype=np.int64), 2**31 + 11)
    r, piv = rref_mod(np.zeros((0, 4), dtype=np.int64), 5)
    assert r.shape == (0, 4) and piv.size == 0


def test_zero_matrix_has_no_pivots():
    r, piv = rref_mod(np.zeros((3, 3), dtype=np.int64), 3)
    assert r.shape[0] == 0 and piv.size == 0


def test_primes_used_are_prime():
    assert all(is_prime(p) for p in PRIMES)
