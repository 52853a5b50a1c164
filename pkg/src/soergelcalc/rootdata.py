"""Based root data, Weyl groups, reduced words and the Bruhat order.

Elements of ``W`` are identified by their lexicographically least reduced
word in the simple reflections (0-based indices, Bourbaki numbering).  The
group is enumerated once; every element carries its position in the sorted
list ``(length, word)`` so tables are deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DEFAULT_MAX_WEYL = 10_000


class UnsupportedPreset(ValueError):
    pass


class WeylCapExceeded(RuntimeError):
    pass


class DatumMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Simple roots live in X, simple coroots in Y; pairing is the dot product.

    ``cartan[i][j] = <alpha_i, alpha_j^vee>``.
    """

    rank: int
    simple_roots: tuple[tuple[int, ...], ...]
    simple_coroots: tuple[tuple[int, ...], ...]
    cartan: tuple[tuple[int, ...], ...]
    preset_tag: str
    components: tuple[str, ...]
    adjoint: bool

    def __post_init__(self):
        n = len(self.simple_roots)
        if len(self.simple_coroots) != n:
            raise ValueError("roots and coroots differ in number")
        for i in range(n):
            if self.cartan[i][i] != 2:
                raise ValueError("cartan diagonal must be 2")
            for j in range(n):
                if i != j and self.cartan[i][j] > 0:
                    raise ValueError("cartan off-diagonal entries must be <= 0")
                pairing = sum(a * b for a, b in zip(self.simple_roots[i], self.simple_coroots[j]))
                if pairing != self.cartan[i][j]:
                    raise ValueError("cartan does not match the root/coroot pairing")

    @property
    def num_simple(self) -> int:
        return len(self.simple_roots)

    def pairing(self, i: int, y) -> int:
        """<alpha_i, y> for y in Y."""
        return int(sum(a * b for a, b in zip(self.simple_roots[i], y)))

    @cached_property
    def reflections_Y(self) -> tuple[np.ndarray, ...]:
        """Matrices of s_i on Y: y -> y - <alpha_i, y> alpha_i^vee."""
        mats = []
        for i in range(self.num_simple):
            a = np.array(self.simple_roots[i], dtype=np.int64)
            c = np.array(self.simple_coroots[i], dtype=np.int64)
            mats.append(np.eye(self.rank, dtype=np.int64) - np.outer(c, a))
        return tuple(mats)

    @cached_property
    def reflections_X(self) -> tuple[np.ndarray, ...]:
        """Matrices of s_i on X: x -> x - <x, alpha_i^vee> alpha_i."""
        mats = []
        for i in range(self.num_simple):
            a = np.array(self.simple_roots[i], dtype=np.int64)
            c = np.array(self.simple_coroots[i], dtype=np.int64)
            mats.append(np.eye(self.rank, dtype=np.int64) - np.outer(a, c))
        return tuple(mats)

    def delta(self, i: int) -> tuple[int, ...]:
        """First basis vector of Y pairing to 1 with alpha_i."""
        for j in range(self.rank):
            if self.simple_roots[i][j] == 1:
                return tuple(int(k == j) for k in range(self.rank))
        raise ValueError(f"no lattice vector with <alpha_{i}, y> = 1 in the basis of Y")

    def roots(self) -> list[tuple[int, ...]]:
        """All roots, as the W-orbit of the simple roots in X."""
        seen = {tuple(r) for r in self.simple_roots}
        todo = list(seen)
        while todo:
            x = np.array(todo.pop(), dtype=np.int64)
            for s in self.reflections_X:
                y = tuple(int(t) for t in s @ x)
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return sorted(seen)

    @property
    def num_positive_roots(self) -> int:
        return len(self.roots()) // 2

    def __repr__(self) -> str:
        return f"RootDatum({self.preset_tag})"


# -- presets -------------------------------------------------------------------

def cartan_matrix(kind: str, n: int) -> list[list[int]]:
    """Cartan matrix with entries <alpha_i, alpha_j^vee>, Bourbaki numbering."""
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a_ij=-1, a_ji=-1):
        c[i][j] = a_ij
        c[j][i] = a_ji

    if kind == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif kind == "B":
        for i in range(n - 2):
            link(i, i + 1)
        # alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
        link(n - 2, n - 1, -2, -1)
    elif kind == "C":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)
    elif kind == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif kind == "E":
        link(0, 2)
        link(1, 3)
        link(2, 3)
        for i in range(3, n - 1):
            link(i, i + 1)
    elif kind == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif kind == "G":
        # alpha_1 short, alpha_2 long
        link(0, 1, -1, -3)
    else:
        raise UnsupportedPreset(kind)
    return c


_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4}
_PRESET_RE = re.compile(r"^(GL|[A-G])(\d+)$")


def parse_preset(label: str) -> tuple[str, int]:
    m = _PRESET_RE.match(label.strip().upper())
    if not m:
        raise UnsupportedPreset(f"cannot parse preset {label!r}")
    kind, n = m.group(1), int(m.group(2))
    ok = {
        "GL": n >= 1,
        "A": n >= 1,
        "B": n >= 2,
        "C": n >= 2,
        "D": n >= 4,
        "E": n in (6, 7, 8),
        "F": n == 4,
        "G": n == 2,
    }
    if not ok[kind]:
        raise UnsupportedPreset(f"no root system {kind}{n}")
    return kind, n


def build_root_datum(preset: str) -> RootDatum:
    """Root datum for ``GLn`` (Y = Z^n) or an adjoint simple type.

    Adjoint types use X = root lattice (basis: simple roots) and
    Y = coweight lattice (basis: fundamental coweights).
    """
    kind, n = parse_preset(preset)
    if kind == "GL":
        roots, coroots = [], []
        for i in range(n - 1):
            v = [0] * n
            v[i], v[i + 1] = 1, -1
            roots.append(tuple(v))
            coroots.append(tuple(v))
        cartan = cartan_matrix("A", n - 1) if n > 1 else []
        comps = (f"A{n - 1}",) if n > 1 else ()
        return RootDatum(n, tuple(roots), tuple(coroots),
                         tuple(tuple(r) for r in cartan), f"GL{n}", comps, adjoint=False)
    c = cartan_matrix(kind, n)
    roots = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    coroots = tuple(tuple(c[i][j] for i in range(n)) for j in range(n))
    return RootDatum(n, roots, coroots, tuple(tuple(r) for r in c), f"{kind}{n}",
                     (f"{kind}{n}",), adjoint=True)


def is_good_prime(datum: RootDatum, ell: int) -> bool:
    for comp in datum.components:
        kind = comp[0]
        if ell == 2 and kind != "A":
            return False
        if ell == 3 and kind in "EFG":
            return False
        if ell == 5 and comp == "E8":
            return False
    return True


def fundamental_group_order(datum: RootDatum) -> int:
    if not datum.adjoint:
        return 1
    return int(round(abs(np.linalg.det(np.array(datum.cartan, dtype=np.int64)))))


class BadPrime(ValueError):
    pass


def check_prime(datum: RootDatum, ell: int) -> None:
    """Reject primes outside the supported range for ``datum``.

    Besides bad primes this rejects l dividing the index of the coroot lattice
    in Y for adjoint presets (only possible in type A): there the reflection
    representation on Y (x) F_l degenerates and the coinvariant algebra has
    the wrong rank.
    """
    from .linalg import is_prime

    if not is_prime(ell):
        raise BadPrime(f"{ell} is not prime")
    if not is_good_prime(datum, ell):
        raise BadPrime(f"{ell} is a bad prime for {datum.preset_tag}")
    if fundamental_group_order(datum) % ell == 0:
        raise BadPrime(
            f"{ell} divides |Y / coroot lattice| for {datum.preset_tag}; use GL{datum.num_simple + 1}"
        )


# -- Weyl group ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeylElement:
    group: "WeylGroup" = field(repr=False)
    index: int
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def canonical_form(self) -> tuple[int, ...]:
        return self.word

    @property
    def matrix(self) -> np.ndarray:
        return self.group.matrices[self.index]

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "WeylElement":
        return self.group.invert(self)

    def __eq__(self, other):
        return isinstance(other, WeylElement) and other.group is self.group and other.word == self.word

    def __hash__(self):
        return hash(self.word)

    def __lt__(self, other):
        return (self.length, self.word) < (other.length, other.word)

    def __str__(self) -> str:
        return word_str(self.word)

    def __repr__(self) -> str:
        return f"W[{self}]"


def word_str(word) -> str:
    return "e" if not word else "".join(f"s{i + 1}" for i in word)


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "e"):
        return ()
    parts = re.findall(r"s(\d+)", text)
    if "".join(f"s{p}" for p in parts) != text:
        raise ValueError(f"cannot parse word {text!r}")
    return tuple(int(p) - 1 for p in parts)


class WeylGroup:
    """The Weyl group of a root datum, acting faithfully on Y."""

    def __init__(self, datum: RootDatum, max_size: int = DEFAULT_MAX_WEYL):
        self.datum = datum
        gens = datum.reflections_Y
        r = len(gens)
        ident = np.eye(datum.rank, dtype=np.int64)
        key = lambda m: m.tobytes()
        # breadth-first by length; lex-least word = smallest first letter,
        # then lex-least word of the remainder (left multiplication)
        words = {key(ident): ()}
        mats = {key(ident): ident}
        level = [key(ident)]
        while level:
            nxt: dict[bytes, tuple[int, ...]] = {}
            for k in level:
                m = mats[k]
                for s in range(r):
                    prod = gens[s] @ m
                    pk = key(prod)
                    if pk in words:
                        continue
                    cand = (s,) + words[k]
                    if pk not in nxt or cand < nxt[pk]:
                        nxt[pk] = cand
                        mats[pk] = prod
            for pk, w in nxt.items():
                words[pk] = w
            level = list(nxt)
            if len(words) > max_size:
                raise WeylCapExceeded(
                    f"|W| exceeds the cap of {max_size} for {datum.preset_tag}"
                )
        order = sorted(words, key=lambda k: (len(words[k]), words[k]))
        self.elements = [WeylElement(self, i, words[k]) for i, k in enumerate(order)]
        self.matrices = [mats[k] for k in order]
        self._by_key = {k: i for i, k in enumerate(order)}
        self._by_word = {e.word: e.index for e in self.elements}
        self.num_simple = r
        # left and right multiplication by simple reflections
        self.lmul = np.array([[self._lookup(gens[s] @ self.matrices[w]) for w in range(len(order))]
                              for s in range(r)], dtype=np.int64)
        self.rmul = np.array([[self._lookup(self.matrices[w] @ gens[s]) for w in range(len(order))]
                              for s in range(r)], dtype=np.int64)

    def _lookup(self, m: np.ndarray) -> int:
        return self._by_key[m.tobytes()]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> WeylElement:
        return self.elements[i]

    @property
    def identity(self) -> WeylElement:
        return self.elements[0]

    def simple(self, s: int) -> WeylElement:
        return self.elements[self._by_word[(s,)]]

    def from_word(self, word) -> WeylElement:
        """Element represented by any (not necessarily reduced) word."""
        idx = 0
        for s in word:
            idx = int(self.rmul[s, idx])
        return self.elements[idx]

    def element(self, text: str) -> WeylElement:
        return self.from_word(parse_word(text))

    def _check(self, *xs):
        for x in xs:
            if x.group is not self:
                raise DatumMismatch("elements belong to different Weyl groups")

    def multiply(self, x: WeylElement, y: WeylElement) -> WeylElement:
        self._check(x, y)
        idx = y.index
        for s in reversed(x.word):
            idx = int(self.lmul[s, idx])
        return self.elements[idx]

    def invert(self, x: WeylElement) -> WeylElement:
        self._check(x)
        return self.from_word(tuple(reversed(x.word)))

    @cached_property
    def inverse_index(self) -> np.ndarray:
        return np.array([self.invert(x).index for x in self.elements], dtype=np.int64)

    def longest_element(self) -> WeylElement:
        return self.elements[-1]

    def left_descents(self, x: WeylElement) -> list[int]:
        return [s for s in range(self.num_simple) if self.elements[self.lmul[s, x.index]].length < x.length]

    def right_descents(self, x: WeylElement) -> list[int]:
        return [s for s in range(self.num_simple) if self.elements[self.rmul[s, x.index]].length < x.length]

    # -- Bruhat order --------------------------------------------------------

    def lower_interval(self, y: WeylElement) -> frozenset[int]:
        """Indices of all x <= y: products of subwords of one reduced word of y."""
        reach = {0}
        for s in y.word:
            reach |= {int(self.rmul[s, x]) for x in reach}
        return frozenset(reach)

    @cached_property
    def bruhat_matrix(self) -> np.ndarray:
        """``B[x, y]`` is True iff x <= y."""
        n = len(self)
        b = np.zeros((n, n), dtype=bool)
        for y in self.elements:
            for x in self.lower_interval(y):
                b[x, y.index] = True
        return b

    def bruhat_leq(self, x: WeylElement, y: WeylElement) -> bool:
        self._check(x, y)
        return bool(self.bruhat_matrix[x.index, y.index])

    def reduced_words(self, x: WeylElement) -> list[tuple[int, ...]]:
        """All reduced words of ``x`` (exhaustive; small groups only)."""
        if x.length == 0:
            return [()]
        out = []
        for s in self.right_descents(x):
            xs = self.elements[self.rmul[s, x.index]]
            out.extend(w + (s,) for w in self.reduced_words(xs))
        return sorted(out)


def enumerate_weyl(datum: RootDatum, max_size: int = DEFAULT_MAX_WEYL) -> list[WeylElement]:
    return WeylGroup(datum, max_size).elements
