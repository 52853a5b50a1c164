"""Exact linear algebra over Q, Z_(l) and F_l.

Matrices over Q and Z_(l) are numpy object arrays holding Python ``int`` or
``Fraction`` entries; matrices over F_l are int64 arrays with entries in
``[0, l)``.  Kernels over Q are computed multi-modularly: row reduce modulo
large primes, rebuild the rational echelon form by CRT and rational
reconstruction, then verify the kernel exactly.  The rank modulo a prime never
exceeds the rank over Q, so a verified kernel of the predicted dimension is a
certificate.  Z_(l)-kernels are the Q-kernel intersected with Z_(l)^n, found
by l-saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Callable

import numpy as np

from ._kernels import rref_mod

# primes just below 2**31
PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549,
    2147483543, 2147483497, 2147483489, 2147483477, 2147483423, 2147483399,
    2147483353, 2147483323, 2147483269, 2147483249, 2147483237, 2147483179,
    2147483171, 2147483137, 2147483123, 2147483077, 2147483069, 2147483059,
)

_INT64_SAFE = 2**62


class ReconstructionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CoefRing:
    """Coefficient ring: rationals, integers localised at l, or F_l."""

    kind: str
    ell: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "O", "F"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Q" and self.ell is not None:
            raise ValueError("the rationals carry no prime")
        if self.kind != "Q":
            if self.ell is None or not is_prime(self.ell):
                raise ValueError(f"ring {self.kind} needs a prime, got {self.ell}")
            if self.ell >= 2**31:
                raise ValueError("prime too large")

    @classmethod
    def rationals(cls) -> "CoefRing":
        return cls("Q")

    @classmethod
    def local_integers(cls, ell: int) -> "CoefRing":
        return cls("O", ell)

    @classmethod
    def prime_field(cls, ell: int) -> "CoefRing":
        return cls("F", ell)

    @classmethod
    def parse(cls, name: str) -> "CoefRing":
        name = name.strip()
        if name in ("Q", "K"):
            return cls.rationals()
        if name[:1] in ("O", "F") and name[1:].isdigit():
            return cls(name[0], int(name[1:]))
        raise ValueError(f"cannot parse ring {name!r}")

    @property
    def name(self) -> str:
        return "Q" if self.kind == "Q" else f"{self.kind}{self.ell}"

    @property
    def is_field(self) -> bool:
        return self.kind != "O"

    @property
    def modular(self) -> bool:
        return self.kind == "F"

    def __str__(self) -> str:
        return self.name

    # -- elements ---------------------------------------------------------

    def matrix(self, data) -> np.ndarray:
        """Coerce nested ints / Fractions / 'p/q' strings into this ring."""
        arr = np.array(data, dtype=object)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if self.kind == "F":
            return reduce_mod(arr, self.ell)
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = _to_fraction(x)
        if self.kind == "O":
            for x in out.flat:
                if x.denominator % self.ell == 0:
                    raise ValueError(f"{x} is not {self.ell}-integral")
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.kind == "F":
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(0)
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1
        return out

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "F":
            return (a @ b) % self.ell
        return rat_matmul(a, b)

    def add(self, a, b):
        return (a + b) % self.ell if self.kind == "F" else a + b

    def sub(self, a, b):
        return (a - b) % self.ell if self.kind == "F" else a - b

    def scale(self, c, a):
        if self.kind == "F":
            return (int(c) % self.ell * a) % self.ell
        return a * _to_fraction(c)

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.any(a != 0)

    def residue(self, a: np.ndarray) -> np.ndarray:
        """Image in the residue field F_l (only for O and F)."""
        if self.kind == "F":
            return a
        if self.kind == "O":
            return reduce_mod(a, self.ell)
        raise ValueError("Q has no residue field in this package")

    def is_unit(self, x) -> bool:
        if self.kind == "F":
            return int(x) % self.ell != 0
        x = _to_fraction(x)
        if self.kind == "Q":
            return x != 0
        return x.numerator % self.ell != 0

    def residue_rank(self, a: np.ndarray) -> int:
        """Rank over the residue field (Q itself for Q)."""
        a = np.asarray(a)
        if a.size == 0:
            return 0
        if self.kind == "Q":
            return len(frac_rref(a)[1])
        return len(rref_mod(self.residue(a), self.ell)[1])

    def residue_pivots(self, a: np.ndarray) -> list[int]:
        """Pivot columns of the echelon form over the residue field."""
        a = np.asarray(a)
        if a.size == 0:
            return []
        if self.kind == "Q":
            return list(frac_rref(a)[1])
        return [int(c) for c in rref_mod(self.residue(a), self.ell)[1]]

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if self.kind == "F":
            aug = np.concatenate([a % self.ell, np.eye(n, dtype=np.int64)], axis=1)
            r, piv = rref_mod(aug, self.ell)
            if len(piv) < n or piv[n - 1] >= n:
                raise ZeroDivisionError("matrix not invertible")
            return r[:, n:].copy()
        inv = frac_inverse(a)
        if self.kind == "O":
            for x in inv.flat:
                if x.denominator % self.ell == 0:
                    raise ZeroDivisionError("matrix not invertible over Z_(l)")
        return inv

    def kernel(self, a_int: np.ndarray) -> np.ndarray:
        """Basis (as columns) of the kernel of an integer matrix over this ring.

        Over Z_(l) the returned basis spans the saturated lattice
        ``ker(a) ∩ Z_(l)^n``.
        """
        n = a_int.shape[1]
        if self.kind == "F":
            return nullspace_mod(a_int, self.ell)
        k = rational_kernel(a_int)
        if self.kind == "O" and k.shape[1]:
            k = saturate(k, self.ell)
        return k

    def to_strings(self, a: np.ndarray) -> list:
        if self.kind == "F":
            return a.astype(int).tolist()
        return [[_frac_str(x) for x in row] for row in a]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(int(x))


def _frac_str(x) -> str:
    x = _to_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def valuation(x, ell: int) -> float:
    x = _to_fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % ell == 0:
        n //= ell
        v += 1
    while d % ell == 0:
        d //= ell
        v -= 1
    return v


# -- conversions -------------------------------------------------------------

def integerize(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Write a rational matrix as ``num / den`` with integer ``num``."""
    if a.dtype != object:
        return a.astype(np.int64), 1
    den = 1
    for x in a.flat:
        d = x.denominator if isinstance(x, Fraction) else 1
        if d != 1:
            den = lcm(den, d)
    num = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        x = _to_fraction(x)
        num[idx] = x.numerator * (den // x.denominator)
    return compact_int(num), den


def compact_int(a: np.ndarray) -> np.ndarray:
    """int64 copy of an integer matrix when entries are small, else objects."""
    if a.dtype != object:
        return a
    if a.size == 0:
        return a.astype(np.int64)
    m = max(abs(int(x)) for x in a.flat)
    if m < 2**31:
        return a.astype(np.int64)
    return a


def reduce_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Reduce an integer / rational matrix modulo ``p`` into int64."""
    a = np.asarray(a)
    if a.dtype != object:
        return (a.astype(np.int64) % p).astype(np.int64)
    out = np.empty(a.shape, dtype=np.int64)
    for idx, x in np.ndenumerate(a):
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
            out[idx] = x.numerator % p * pow(x.denominator, -1, p) % p
        else:
            out[idx] = int(x) % p
    return out


def int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of integer matrices, int64 when provably safe."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if a.dtype != object and b.dtype != object and a.size and b.size:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1]
        if bound < _INT64_SAFE:
            return a @ b
    return a.astype(object) @ b.astype(object)


def rat_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of rational matrices via a common-denominator split."""
    an, ad = integerize(a)
    bn, bd = integerize(b)
    prod = int_matmul(an, bn)
    den = ad * bd
    out = np.empty(prod.shape, dtype=object)
    for idx, x in np.ndenumerate(prod):
        out[idx] = Fraction(int(x), den)
    return out


# -- small exact Gaussian elimination ---------------------------------------

def frac_rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Plain Gauss-Jordan over Q; intended for small matrices."""
    m = [[_to_fraction(x) for x in row] for row in np.asarray(a)]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    out = np.empty((r, cols), dtype=object)
    for i in range(r):
        for j in range(cols):
            out[i, j] = m[i][j]
    return out, piv


def frac_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = a
    aug[:, n:] = 0
    for i in range(n):
        aug[i, n + i] = 1
    r, piv = frac_rref(aug)
    if len(piv) < n or piv[n - 1] >= n:
        raise ZeroDivisionError("matrix not invertible")
    return r[:, n:]


# -- modular kernels ---------------------------------------------------------

def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Kernel basis over F_p, one vector per free column (as columns)."""
    n = a.shape[1]
    r, piv = rref_mod(a, p) if a.shape[0] else (np.zeros((0, n), np.int64), np.zeros(0, np.int64))
    pivset = set(int(c) for c in piv)
    free = [c for c in range(n) if c not in pivset]
    k = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        k[f, j] = 1
        if len(piv):
            k[piv, j] = (-r[:, f]) % p
    return k


def ratrecon(a: int, m: int) -> Fraction | None:
    """Rational number r/s with r = a s (mod m) and |r|, |s| <= sqrt(m/2)."""
    bound = isqrt(m // 2)
    a %= m
    if a <= bound:
        return Fraction(a)
    if m - a <= bound:
        return Fraction(a - m)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _reconstruct(residues: np.ndarray, modulus: int) -> np.ndarray | None:
    out = np.empty(residues.shape, dtype=object)
    for idx, x in np.ndenumerate(residues):
        x = int(x)
        if x == 0:
            out[idx] = 0
            continue
        f = ratrecon(x, modulus)
        if f is None:
            return None
        out[idx] = f
    return out


def multimodular_rref(
    reduce: Callable[[int], np.ndarray],
    verify: Callable[[np.ndarray, list[int]], bool],
    max_primes: int = len(PRIMES),
    select: Callable[[np.ndarray, tuple[int, ...]], np.ndarray] | None = None,
) -> tuple[np.ndarray, list[int]]:
    """Rational RREF (or a slice of it) from modular images.

    ``reduce(p)`` returns the matrix modulo ``p``; ``select(R, pivots)`` picks
    the entries that are actually needed (default: all of R);
    ``verify(candidate, pivots)`` checks a rational candidate exactly.  Primes
    whose pivot pattern is dominated (lower rank, or same rank with later
    pivots) are discarded as unlucky.
    """
    best_piv: tuple[int, ...] | None = None
    crt = None
    modulus = 1
    for p in PRIMES[:max_primes]:
        r, piv = rref_mod(reduce(p), p)
        piv_t = tuple(int(c) for c in piv)
        part = r if select is None else select(r, piv_t)
        if best_piv is None or len(piv_t) > len(best_piv) or (
            len(piv_t) == len(best_piv) and piv_t < best_piv
        ):
            best_piv, crt, modulus = piv_t, part.astype(object), p
        elif piv_t != best_piv:
            continue
        else:
            inv = pow(modulus, -1, p)
            diff = (part.astype(object) - crt) % p
            crt = crt + modulus * ((diff * inv) % p)
            modulus *= p
        cand = _reconstruct(crt, modulus)
        if cand is None:
            continue
        if verify(cand, list(best_piv)):
            return cand, list(best_piv)
    raise ReconstructionError("rational reconstruction did not converge")


def _columns_to_int(k: np.ndarray) -> np.ndarray:
    """Scale each rational column to a primitive integer column."""
    out = np.empty(k.shape, dtype=object)
    for j in range(k.shape[1]):
        col = [_to_fraction(x) for x in k[:, j]]
        den = 1
        for x in col:
            den = lcm(den, x.denominator)
        ints = [int(x * den) for x in col]
        g = 0
        for x in ints:
            g = gcd(g, x)
        g = g or 1
        for i, x in enumerate(ints):
            out[i, j] = x // g
    return out


def rational_kernel(a_int: np.ndarray) -> np.ndarray:
    """Exact Q-kernel of an integer matrix as primitive integer columns."""
    m, n = a_int.shape
    if n == 0:
        return np.zeros((0, 0), dtype=object)
    if m == 0 or not np.any(a_int != 0):
        return np.eye(n, dtype=np.int64).astype(object)

    def free_of(piv):
        pivset = set(piv)
        return [c for c in range(n) if c not in pivset]

    # only the free columns of the echelon form enter the kernel
    def select(r, piv):
        return r[:, free_of(piv)]

    holder = {}

    def verify(rf, piv):
        free = free_of(piv)
        k = np.zeros((n, len(free)), dtype=object)
        for j, f in enumerate(free):
            k[f, j] = 1
            for i, c in enumerate(piv):
                k[c, j] = -rf[i, j]
        kint = compact_int(_columns_to_int(k))
        if not np.all(int_matmul(a_int, kint) == 0):
            return False
        holder["k"] = kint
        return True

    multimodular_rref(lambda p: reduce_mod(a_int, p), verify, select=select)
    return holder["k"].astype(object)


def rational_rank(a: np.ndarray) -> int:
    """Exact rank over Q of an integer or rational matrix."""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    num, _ = integerize(a) if a.dtype == object else (a, 1)
    return len(rational_rref(num)[1])


def rational_rref(a_int: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Exact RREF of an integer matrix over Q (row space certificate)."""
    m, n = a_int.shape
    if m == 0 or not np.any(a_int != 0):
        return np.zeros((0, n), dtype=object), []

    def verify(r, piv):
        rn, rd = integerize(r)
        lhs = int_matmul(np.asarray(a_int)[:, piv] if len(piv) else np.zeros((m, 0), np.int64), rn)
        rhs = np.asarray(a_int).astype(object) * rd
        return bool(np.all(lhs == rhs))

    return multimodular_rref(lambda p: reduce_mod(a_int, p), verify)


def saturate(k: np.ndarray, ell: int) -> np.ndarray:
    """l-saturate the lattice spanned by the columns of a rational matrix.

    Returns columns spanning ``(Q-span) ∩ Z_(l)^n`` over Z_(l); the result
    has l-integral entries and is linearly independent modulo l.
    """
    cols = [[_to_fraction(x) for x in k[:, j]] for j in range(k.shape[1])]

    def primitive(col):
        v = min(valuation(x, ell) for x in col)
        if v == float("inf"):
            raise ValueError("zero column cannot be saturated")
        f = Fraction(ell) ** (-int(v))
        return [x * f for x in col]

    cols = [primitive(c) for c in cols]
    n = k.shape[0]
    while True:
        mat = np.empty((n, len(cols)), dtype=object)
        for j, c in enumerate(cols):
            mat[:, j] = c
        rel = nullspace_mod(reduce_mod(mat, ell), ell)
        if rel.shape[1] == 0:
            return mat
        c = [int(x) for x in rel[:, 0]]
        i = max(j for j, x in enumerate(c) if x)
        combo = [sum(c[j] * cols[j][row] for j in range(len(cols))) / ell for row in range(n)]
        cols[i] = primitive(combo)
