"""Row reduction modulo a prime.

This is the inner loop of every linear solve in the package: graded Hom
spaces, invariants and coinvariant quotients all end up as a kernel or row
space computation over F_p.  Two interchangeable implementations are kept:

* a numba ``@njit`` kernel (default when numba imports), and
* a pure numpy path, vectorised over rows.

Set ``SOERGELCALC_DISABLE_NUMBA=1`` to force the numpy path.  Both return the
same reduced row echelon form, so results are bit-for-bit identical.

Entries are int64 and the modulus must be below 2**31 so that products of two
residues fit in a signed 64-bit word.
"""

from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "SOERGELCALC_DISABLE_NUMBA"
MAX_MODULUS = 2**31


def _inv_mod_py(a: int, p: int) -> int:
    return pow(int(a), -1, int(p))


def rref_mod_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``a`` over F_p, numpy implementation.

    Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows.
    """
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k], c:] = a[[k, r], c:]
        inv = _inv_mod_py(a[r, c], p)
        a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] + np.outer(p - col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a[:r].copy(), np.array(pivots, dtype=np.int64)


def _make_jit():
    from numba import njit

    @njit(cache=True)
    def inv_mod(a, p):
        t, new_t = 0, 1
        r, new_r = p, a % p
        while new_r != 0:
            q = r // new_r
            t, new_t = new_t, t - q * new_t
            r, new_r = new_r, r - q * new_r
        if t < 0:
            t += p
        return t

    @njit(cache=True)
    def rref_kernel(a, p):
        rows, cols = a.shape
        for i in range(rows):
            for j in range(cols):
                x = a[i, j] % p
                if x < 0:
                    x += p
                a[i, j] = x
        piv = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            k = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    k = i
                    break
            if k < 0:
                continue
            if k != r:
                for j in range(c, cols):
                    tmp = a[r, j]
                    a[r, j] = a[k, j]
                    a[k, j] = tmp
            inv = inv_mod(a[r, c], p)
            for j in range(c, cols):
                a[r, j] = (a[r, j] * inv) % p
            for i in range(rows):
                if i == r:
                    continue
                f = a[i, c]
                if f == 0:
                    continue
                g = p - f
                for j in range(c, cols):
                    a[i, j] = (a[i, j] + g * a[r, j]) % p
            piv[r] = c
            r += 1
        return r, piv

    return rref_kernel


_JIT = None
_JIT_FAILED = False


def numba_enabled() -> bool:
    if os.environ.get(DISABLE_ENV, "").strip() not in ("", "0"):
        return False
    return _load_jit() is not None


def _load_jit():
    global _JIT, _JIT_FAILED
    if _JIT is None and not _JIT_FAILED:
        try:
            _JIT = _make_jit()
        except ImportError:
            _JIT_FAILED = True
    return _JIT


def rref_mod_numba(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    kernel = _load_jit()
    if kernel is None:
        raise RuntimeError("numba is not available")
    work = np.array(a, dtype=np.int64)
    r, piv = kernel(work, np.int64(p))
    return work[:r].copy(), piv[:r].copy()


def rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Dispatch to the numba or numpy row reduction."""
    if p >= MAX_MODULUS:
        raise ValueError(f"modulus {p} too large for int64 kernels")
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros((0, a.shape[1] if a.ndim == 2 else 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
    if numba_enabled():
        return rref_mod_numba(a, p)
    return rref_mod_numpy(a, p)
