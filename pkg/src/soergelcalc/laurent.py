"""Laurent polynomials in one variable with integer coefficients."""

from __future__ import annotations

from typing import Iterable, Mapping


class LaurentPoly:
    """Immutable element of Z[v, v^-1]; zero coefficients are never stored."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                a = int(a)
                if a:
                    c[int(e)] = a
        self._c = dict(sorted(c.items()))
        self._hash = None

    @classmethod
    def monomial(cls, exp: int, coef: int = 1) -> "LaurentPoly":
        return cls({exp: coef})

    @classmethod
    def const(cls, a: int) -> "LaurentPoly":
        return cls({0: a})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0) -> "LaurentPoly":
        """Coefficients listed from exponent ``low`` upwards."""
        return cls({low + i: a for i, a in enumerate(coeffs)})

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def coeff(self, e: int) -> int:
        return self._c.get(e, 0)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def low(self) -> int | None:
        return next(iter(self._c), None)

    @property
    def high(self) -> int | None:
        return next(reversed(self._c), None) if self._c else None

    def to_list(self) -> tuple[int, list[int]]:
        """``(low, [c_low, ..., c_high])``; ``(0, [])`` for zero."""
        if not self._c:
            return 0, []
        lo, hi = self.low, self.high
        return lo, [self._c.get(e, 0) for e in range(lo, hi + 1)]

    def __add__(self, other):
        other = _coerce(other)
        c = dict(self._c)
        for e, a in other._c.items():
            c[e] = c.get(e, 0) + a
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -a for e, a in self._c.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        c: dict[int, int] = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + a1 * a2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers only for monomials; use shift")
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly({e + k: a for e, a in self._c.items()})

    def bar(self) -> "LaurentPoly":
        """The involution v -> v^-1."""
        return LaurentPoly({-e: a for e, a in self._c.items()})

    def substitute_power(self, k: int) -> "LaurentPoly":
        """p(v) -> p(v^k)."""
        return LaurentPoly({e * k: a for e, a in self._c.items()})

    def eval_at_one(self) -> int:
        return sum(self._c.values())

    def is_bar_invariant(self) -> bool:
        return self == self.bar()

    def is_palindromic(self) -> bool:
        """Coefficient sequence reads the same backwards."""
        _, seq = self.to_list()
        return seq == seq[::-1]

    def nonnegative(self) -> bool:
        return all(a > 0 for a in self._c.values())

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._c.items()))
        return self._hash

    def __bool__(self):
        return bool(self._c)

    def __str__(self) -> str:
        return self.format("v")

    def format(self, var: str = "v") -> str:
        if not self._c:
            return "0"
        parts = []
        for e, a in reversed(self._c.items()):
            if e == 0:
                mono = ""
            elif e == 1:
                mono = var
            else:
                mono = f"{var}^{e}" if e > 0 else f"{var}^({e})"
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    return NotImplemented


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
V = LaurentPoly.monomial(1)
V_INV = LaurentPoly.monomial(-1)


def laurent_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def laurent_bar(a: LaurentPoly) -> LaurentPoly:
    return a.bar()


def evaluate_at_one(p: LaurentPoly) -> int:
    return p.eval_at_one()
