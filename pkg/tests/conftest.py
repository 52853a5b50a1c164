"""Shared fixtures and independent oracles."""

from fractions import Fraction
from itertools import permutations

import pytest

from soergelcalc.pipeline import Engine

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def engine():
    return Engine()


def perm_inversions(p) -> int:
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def symmetric_group_lengths(n: int) -> list[int]:
    """Length distribution of S_n via inversion counts."""
    return sorted(perm_inversions(p) for p in permutations(range(n)))


def subword_products(group, word):
    """All elements obtained from subwords of ``word`` (brute force over 2^len)."""
    out = set()
    for mask in range(1 << len(word)):
        sub = tuple(s for i, s in enumerate(word) if mask >> i & 1)
        out.add(group.from_word(sub).index)
    return out


def classical_kl(group):
    """P_{x,w}(q) as coefficient lists, by the textbook recursion with mu terms.

    Uses only lengths, left multiplication and a brute-force Bruhat order, so
    it shares nothing with the Hecke algebra code.
    """
    n = len(group)
    le = [[False] * n for _ in range(n)]
    for y in group.elements:
        for x in subword_products(group, y.word):
            le[x][y.index] = True
    L = [x.length for x in group.elements]
    P = {}

    def add(a, b):
        m = max(len(a), len(b))
        return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(m)]

    def shift(a, k):
        return [0] * k + list(a)

    def trim(a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def mu(z, v):
        d = L[v] - L[z]
        if d % 2 == 0:
            return 0
        c = P.get((z, v), [])
        k = (d - 1) // 2
        return c[k] if k < len(c) else 0

    for w in group.elements:
        wi = w.index
        if wi == 0:
            P[(0, 0)] = [1]
            continue
        s = w.word[0]
        v = int(group.lmul[s, wi])
        for x in range(n):
            if not le[x][wi]:
                continue
            sx = int(group.lmul[s, x])
            c = 1 if L[sx] < L[x] else 0
            t1 = shift(P.get((sx, v), []), 1 - c)
            t2 = shift(P.get((x, v), []), c)
            tot = add(t1, t2)
            for z in range(n):
                if z == v or not le[z][v] or not le[x][z]:
                    continue
                if L[int(group.lmul[s, z])] < L[z]:
                    m = mu(z, v)
                    if m:
                        corr = shift(P[(x, z)], (L[wi] - L[z]) // 2)
                        tot = add(tot, [-m * a for a in corr])
            tot = trim(tot)
            if tot:
                P[(x, wi)] = tot
    return P


def frac_rank(rows) -> int:
    """Rank over Q by plain Gaussian elimination on Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
