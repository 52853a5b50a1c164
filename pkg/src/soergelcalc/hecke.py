"""Hecke algebra of a Weyl group and its Kazhdan-Lusztig basis.

Normalisation: ``H_s^2 = (v^-1 - v) H_s + 1`` and ``b_s = H_s + v``.  With
this choice ``b_w = sum_x h_{x,w} H_x`` has ``h_{x,w} in v Z[v]`` for x < w,
and ``h_{x,w}(v) = v^{l(w)-l(x)} P_{x,w}(v^-2)`` recovers the classical
polynomials in ``q = v^-2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .laurent import ONE, V, V_INV, ZERO, LaurentPoly
from .rootdata import DatumMismatch, RootDatum, WeylGroup, word_str


class HeckeElement:
    """Finite combination of standard basis elements, keyed by element index."""

    __slots__ = ("group", "terms")

    def __init__(self, group: WeylGroup, terms: dict[int, LaurentPoly] | None = None):
        self.group = group
        self.terms = {k: p for k, p in (terms or {}).items() if p}

    @classmethod
    def standard(cls, group: WeylGroup, x) -> "HeckeElement":
        idx = x if isinstance(x, int) else x.index
        return cls(group, {idx: ONE})

    def coeff(self, x) -> LaurentPoly:
        idx = x if isinstance(x, int) else x.index
        return self.terms.get(idx, ZERO)

    def _check(self, other: "HeckeElement"):
        if other.group is not self.group:
            raise DatumMismatch("Hecke elements over different Weyl groups")

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        self._check(other)
        t = dict(self.terms)
        for k, p in other.terms.items():
            t[k] = t.get(k, ZERO) + p
        return HeckeElement(self.group, t)

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        return self + other.scale(LaurentPoly.const(-1))

    def scale(self, c: LaurentPoly) -> "HeckeElement":
        return HeckeElement(self.group, {k: c * p for k, p in self.terms.items()})

    def left_mul_simple(self, s: int) -> "HeckeElement":
        """H_s * self."""
        g = self.group
        t: dict[int, LaurentPoly] = {}
        for x, p in self.terms.items():
            sx = int(g.lmul[s, x])
            t[sx] = t.get(sx, ZERO) + p
            if g[sx].length < g[x].length:
                t[x] = t.get(x, ZERO) + p * (V_INV - V)
        return HeckeElement(g, t)

    def left_mul_b(self, s: int) -> "HeckeElement":
        """b_s * self."""
        return self.left_mul_simple(s) + self.scale(V)

    def bar(self) -> "HeckeElement":
        """Bar involution: v -> v^-1 and H_x -> (H_{x^-1})^-1."""
        g = self.group
        out = HeckeElement(g)
        for x, p in self.terms.items():
            # (H_{x^-1})^-1 = prod over the word of x of H_s^-1 = H_s + v - v^-1
            img = HeckeElement.standard(g, 0)
            for s in reversed(g[x].word):
                img = img.left_mul_simple(s) + img.scale(V - V_INV)
            out = out + img.scale(p.bar())
        return out

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and other.group is self.group and other.terms == self.terms

    def __repr__(self) -> str:
        items = sorted(self.terms.items())
        return " + ".join(f"({p})H[{self.group[x]}]" for x, p in items) or "0"


def hecke_multiply(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    a._check(b)
    g = a.group
    out = HeckeElement(g)
    for x, p in a.terms.items():
        prod = b
        for s in reversed(g[x].word):
            prod = prod.left_mul_simple(s)
        out = out + prod.scale(p)
    return out


@dataclass
class KLTable:
    """``h[(x, w)]`` for x <= w (element indices)."""

    group: WeylGroup
    h: dict[tuple[int, int], LaurentPoly]

    def hpoly(self, x, w) -> LaurentPoly:
        xi = x if isinstance(x, int) else x.index
        wi = w if isinstance(w, int) else w.index
        return self.h.get((xi, wi), ZERO)

    def P(self, x, w) -> LaurentPoly:
        """Classical P_{x,w} as a polynomial in q (exponents are powers of q)."""
        xi = x if isinstance(x, int) else x.index
        wi = w if isinstance(w, int) else w.index
        hp = self.hpoly(xi, wi)
        d = self.group[wi].length - self.group[xi].length
        out = {}
        for e, a in hp.coeffs.items():
            if (d - e) % 2:
                raise ValueError("parity violation in KL polynomial")
            out[(d - e) // 2] = a
        return LaurentPoly(out)

    def basis_element(self, w) -> HeckeElement:
        wi = w if isinstance(w, int) else w.index
        return HeckeElement(self.group, {x: p for (x, y), p in self.h.items() if y == wi})

    def pairs(self):
        return sorted(self.h)

    def to_json_obj(self) -> dict:
        g = self.group
        entries = []
        for x, w in self.pairs():
            lo, hv = self.hpoly(x, w).to_list()
            _, pq = self.P(x, w).to_list()
            entries.append({
                "x": word_str(g[x].word),
                "w": word_str(g[w].word),
                "h_v": {"low": lo, "coeffs": hv},
                "P_q": pq,
            })
        return {"preset": g.datum.preset_tag, "order": len(g), "entries": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1)


def kl_basis(group_or_datum, max_weyl: int | None = None) -> KLTable:
    """Kazhdan-Lusztig basis by the recursion b_s b_{sw} = b_w + sum mu b_z."""
    g = group_or_datum if isinstance(group_or_datum, WeylGroup) else (
        WeylGroup(group_or_datum) if max_weyl is None else WeylGroup(group_or_datum, max_weyl)
    )
    basis: dict[int, HeckeElement] = {0: HeckeElement.standard(g, 0)}
    for w in g.elements[1:]:
        s = g.left_descents(w)[0]
        sw = int(g.lmul[s, w.index])
        elt = basis[sw].left_mul_b(s)
        # subtract lower terms until all non-leading coefficients lie in vZ[v]
        for z in sorted(elt.terms, key=lambda i: -g[i].length):
            if z == w.index:
                continue
            c = elt.coeff(z)
            mu = c.coeff(0)
            if mu:
                elt = elt - basis[z].scale(LaurentPoly.const(mu))
        basis[w.index] = elt
    h = {}
    for w, b in basis.items():
        for x, p in b.terms.items():
            h[(x, w)] = p
    table = KLTable(g, h)
    _check_table(table)
    return table


def _check_table(table: KLTable) -> None:
    g = table.group
    for (x, w), p in table.h.items():
        if x == w:
            if p != ONE:
                raise ArithmeticError(f"h_{{w,w}} != 1 at {g[w]}")
            continue
        if not g.bruhat_matrix[x, w]:
            raise ArithmeticError(f"support outside the Bruhat interval: {g[x]} !<= {g[w]}")
        if p.low is not None and p.low < 1:
            raise ArithmeticError(f"h_{{{g[x]},{g[w]}}} = {p} not in vZ[v]")


def kl_inversion_check(table: KLTable) -> dict:
    """sum_{x<=z<=y} (-1)^{l(z)-l(x)} P_{x,z} P_{w0 y, w0 z} = delta_{x,y}."""
    g = table.group
    w0 = g.longest_element()
    w0i = [g.multiply(w0, z).index for z in g.elements]
    B = g.bruhat_matrix
    n = len(g)
    checked = 0
    for x in range(n):
        for y in range(n):
            if not B[x, y]:
                continue
            total = ZERO
            for z in range(n):
                if B[x, z] and B[z, y]:
                    term = table.P(x, z) * table.P(w0i[y], w0i[z])
                    if (g[z].length - g[x].length) % 2:
                        term = -term
                    total = total + term
            expect = ONE if x == y else ZERO
            checked += 1
            if total != expect:
                return {"pass": False, "checked": checked,
                        "counterexample": {"x": str(g[x]), "y": str(g[y]), "value": str(total)}}
    return {"pass": True, "checked": checked, "counterexample": None}


def check_bar_invariance(table: KLTable) -> bool:
    return all(table.basis_element(w).bar() == table.basis_element(w) for w in range(len(table.group)))
