"""Graded Soergel modules as free graded modules with commuting actions.

A module is a free graded module over the coefficient ring together with one
matrix per basis vector y_j of Y (a degree-2 generator of C).  Basis vectors
are sorted by degree, so every homogeneous piece is a contiguous block.

Indecomposables are built inductively.  For w = y s with l(w) > l(y) the
module C (x)_{C_s} D_y <1> contains D_w once, and every other summand is a
shift of some D_x with x < w.  Multiplicities come from the local
intersection pairing: for a known indecomposable D with one-dimensional
lowest degree piece (basis vector g) and a module M,

    mult of D<n> in M = residue rank of  G[a, b] = (p_a o i_b)[g, g]

with p_a running over Hom(M, D<n>) and i_b over Hom(D<n>, M), both of degree 0.
Summands are split off by passing to the quotient by the image of the chosen
embeddings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .coinvariant import CoinvariantAlgebra, build_coinvariants
from .laurent import LaurentPoly
from .linalg import (
    CoefRing,
    _frac_str,
    _to_fraction,
    int_matmul,
    integerize,
    nullspace_mod,
    rational_kernel,
    rational_rref,
    reduce_mod,
    saturate,
)
from .rootdata import RootDatum, WeylGroup, check_prime, word_str

SCHEMA_MODULE = "soergelcalc.module/v1"


class ModuleInvariantError(ArithmeticError):
    pass


class PeelError(RuntimeError):
    """Summand search failed; ``budget`` tells whether a cap was hit."""

    def __init__(self, msg: str, budget: bool = False):
        super().__init__(msg)
        self.budget = budget


# -- small ring helpers ------------------------------------------------------------

def _int_form(ring: CoefRing, a: np.ndarray) -> tuple[np.ndarray, int]:
    """(integer matrix, denominator) with a = num / den."""
    if ring.kind == "F":
        return a.astype(np.int64), 1
    if a.size == 0:
        return np.zeros(a.shape, dtype=np.int64), 1
    return integerize(a)


def _rank(ring: CoefRing, a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if ring.kind == "Q":
        num, _ = integerize(a)
        return len(rational_rref(num)[1])
    return ring.residue_rank(a)


def _pivots(ring: CoefRing, a: np.ndarray) -> list[int]:
    a = np.asarray(a)
    if a.size == 0:
        return []
    if ring.kind == "Q":
        num, _ = integerize(a)
        return list(rational_rref(num)[1])
    return ring.residue_pivots(a)


def _residue_scalar(ring: CoefRing, x):
    """Image of a ring element in the residue field (Q for Q)."""
    if ring.kind == "Q":
        return _to_fraction(x)
    if ring.kind == "F":
        return int(x) % ring.ell
    return int(reduce_mod(np.array([[x]], dtype=object), ring.ell)[0, 0])


# -- modules -------------------------------------------------------------------------

@dataclass(eq=False)
class GradedCModule:
    ring: CoefRing
    degrees: np.ndarray
    actions: list[np.ndarray]

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        if self.degrees.size and np.any(np.diff(self.degrees) < 0):
            raise ValueError("basis must be sorted by degree")

    @property
    def rank(self) -> int:
        return int(self.degrees.size)

    @property
    def ngens(self) -> int:
        return len(self.actions)

    def block(self, d: int) -> slice:
        lo = int(np.searchsorted(self.degrees, d, "left"))
        hi = int(np.searchsorted(self.degrees, d, "right"))
        return slice(lo, hi)

    def dim(self, d: int) -> int:
        b = self.block(d)
        return b.stop - b.start

    def degree_set(self) -> list[int]:
        return sorted(set(int(d) for d in self.degrees))

    def graded_rank(self) -> LaurentPoly:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[int(d)] = out.get(int(d), 0) + 1
        return LaurentPoly(out)

    def lowest_index(self) -> int:
        return 0

    def shift(self, n: int) -> "GradedCModule":
        """M<n>, whose degree-d piece is the degree-(d+n) piece of M."""
        return GradedCModule(self.ring, self.degrees - n, [a.copy() for a in self.actions])

    def permuted(self, perm) -> "GradedCModule":
        perm = np.asarray(perm, dtype=np.int64)
        return GradedCModule(self.ring, self.degrees[perm], [a[np.ix_(perm, perm)] for a in self.actions])

    def base_change(self, target: CoefRing) -> "GradedCModule":
        if self.ring.kind != "O":
            raise ValueError("base change starts from the local integers")
        if target.kind == "F":
            if target.ell != self.ring.ell:
                raise ValueError("residue characteristic mismatch")
            acts = [reduce_mod(a, target.ell) for a in self.actions]
        elif target.kind == "Q":
            acts = [a.copy() for a in self.actions]
        else:
            raise ValueError("target must be Q or F")
        return GradedCModule(target, self.degrees.copy(), acts)

    # -- invariants ----------------------------------------------------------

    def check_degrees(self) -> bool:
        for a in self.actions:
            nz = np.argwhere(a != 0)
            for i, j in nz:
                if self.degrees[i] != self.degrees[j] + 2:
                    return False
        return True

    def check_commuting(self) -> bool:
        mm = self.ring.matmul
        for i in range(self.ngens):
            for j in range(i + 1, self.ngens):
                if np.any(mm(self.actions[i], self.actions[j]) != mm(self.actions[j], self.actions[i])):
                    return False
        return True

    def monomial_actions(self, C: CoinvariantAlgebra, kmax: int) -> list[list[np.ndarray]]:
        """Action of each monomial of Sym^k for k <= kmax."""
        sym = C.sym
        mats = [[self.ring.eye(self.rank)]]
        for k in range(1, kmax + 1):
            row = []
            for m in sym.mons[k]:
                j = next(i for i, e in enumerate(m) if e)
                rest = list(m)
                rest[j] -= 1
                row.append(self.ring.matmul(self.actions[j], mats[k - 1][sym.index[k - 1][tuple(rest)]]))
            mats.append(row)
        return mats

    def check_annihilation(self, C: CoinvariantAlgebra) -> bool:
        """Positive-degree invariants act by zero, so the action factors through C."""
        if self.rank == 0:
            return True
        span = int(self.degrees[-1] - self.degrees[0])
        kmax = min(span // 2, C.top + 1)
        if kmax < 1:
            return True
        mons = self.monomial_actions(C, kmax)
        ring = self.ring
        for k in range(1, kmax + 1):
            inv = C.invariants[k]
            for c in range(inv.shape[1]):
                acc = ring.zeros((self.rank, self.rank))
                for i, coef in enumerate(inv[:, c]):
                    if coef != 0:
                        acc = ring.add(acc, ring.scale(coef, mons[k][i]))
                if not ring.is_zero(acc):
                    return False
        return True

    def check(self, C: CoinvariantAlgebra | None = None) -> dict:
        out = {"degrees": self.check_degrees(), "commuting": self.check_commuting()}
        if C is not None:
            out["annihilation"] = self.check_annihilation(C)
        return out

    def validate(self, C: CoinvariantAlgebra | None = None) -> None:
        res = self.check(C)
        bad = [k for k, v in res.items() if not v]
        if bad:
            raise ModuleInvariantError(f"module invariants failed: {bad}")

    # -- serialisation -----------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "schema": SCHEMA_MODULE,
            "ring": self.ring.name,
            "degrees": [int(d) for d in self.degrees],
            "actions": [self.ring.to_strings(a) for a in self.actions],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GradedCModule":
        if obj.get("schema") != SCHEMA_MODULE:
            raise ValueError(f"unknown module schema {obj.get('schema')!r}")
        ring = CoefRing.parse(obj["ring"])
        n = len(obj["degrees"])
        acts = []
        for a in obj["actions"]:
            m = ring.matrix(a) if n else ring.zeros((0, 0))
            acts.append(m.reshape(n, n))
        return cls(ring, np.array(obj["degrees"], dtype=np.int64), acts)

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    def same_as(self, other: "GradedCModule") -> bool:
        return (
            self.ring == other.ring
            and np.array_equal(self.degrees, other.degrees)
            and all(np.array_equal(a, b) for a, b in zip(self.actions, other.actions))
        )


def _sorted_module(ring: CoefRing, degs: np.ndarray, acts: list[np.ndarray]) -> GradedCModule:
    perm = np.argsort(degs, kind="stable")
    return GradedCModule(ring, degs[perm], [a[np.ix_(perm, perm)] for a in acts])


def unit_module(C_or_datum, ring: CoefRing | None = None) -> GradedCModule:
    """The ring itself in degree 0 with Y acting by zero."""
    if isinstance(C_or_datum, CoinvariantAlgebra):
        datum, ring = C_or_datum.datum, C_or_datum.ring
    else:
        datum = C_or_datum
    return GradedCModule(ring, np.zeros(1, dtype=np.int64), [ring.zeros((1, 1)) for _ in range(datum.rank)])


def shift(M: GradedCModule, n: int) -> GradedCModule:
    return M.shift(n)


def direct_sum(*mods: GradedCModule) -> GradedCModule:
    ring = mods[0].ring
    n = sum(m.rank for m in mods)
    degs = np.concatenate([m.degrees for m in mods])
    acts = []
    for j in range(mods[0].ngens):
        a = ring.zeros((n, n))
        off = 0
        for m in mods:
            a[off:off + m.rank, off:off + m.rank] = m.actions[j]
            off += m.rank
        acts.append(a)
    return _sorted_module(ring, degs, acts)


def bs_extend(M: GradedCModule, s: int, datum: RootDatum) -> GradedCModule:
    """C (x)_{C_s} M <1> with basis 1 (x) m, delta_s (x) m.

    Writing h = y_j, p = <alpha_s, h>, D for the action of delta_s and A_cv
    for the action of alpha_s^vee on M, the new action is

        [[A_j - p D,  p D (A_cv - D)],
         [p I,        A_j - p A_cv + p D]]
    """
    ring = M.ring
    n = M.rank
    alpha = datum.simple_roots[s]
    coroot = datum.simple_coroots[s]
    delta = datum.delta(s)
    jd = delta.index(1)
    D = M.actions[jd]
    acv = ring.zeros((n, n))
    for j, c in enumerate(coroot):
        if c:
            acv = ring.add(acv, ring.scale(c, M.actions[j]))
    ident = ring.eye(n)
    corner = ring.matmul(D, ring.sub(acv, D))
    acts = []
    for j in range(datum.rank):
        p = alpha[j]
        A = M.actions[j]
        top = np.concatenate([ring.sub(A, ring.scale(p, D)), ring.scale(p, corner)], axis=1)
        bot = np.concatenate([ring.scale(p, ident), ring.add(ring.sub(A, ring.scale(p, acv)), ring.scale(p, D))], axis=1)
        acts.append(np.concatenate([top, bot], axis=0))
    degs = np.concatenate([M.degrees - 1, M.degrees + 1])
    return _sorted_module(ring, degs, acts)


def bs_module(seq, C: CoinvariantAlgebra) -> GradedCModule:
    """Bott-Samelson module; the last reflection is the outermost tensor factor."""
    M = unit_module(C)
    for s in seq:
        M = bs_extend(M, s, C.datum)
    return M


# -- Hom spaces ------------------------------------------------------------------

@dataclass
class GradedHomSpace:
    source: GradedCModule
    target: GradedCModule
    basis: dict[int, list[np.ndarray]]

    @property
    def graded_rank(self) -> LaurentPoly:
        return LaurentPoly({k: len(b) for k, b in self.basis.items()})

    @property
    def rank(self) -> int:
        return sum(len(b) for b in self.basis.values())

    def degree(self, k: int) -> list[np.ndarray]:
        return self.basis.get(k, [])


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object:
        return np.kron(a.astype(object), b.astype(object))
    big = (int(np.abs(a).max()) if a.size else 0) * (int(np.abs(b).max()) if b.size else 0)
    if big >= 2**62:
        return np.kron(a.astype(object), b.astype(object))
    return np.kron(a, b)


def hom_degree(M: GradedCModule, N: GradedCModule, k: int) -> list[np.ndarray]:
    """Basis of homogeneous module maps M -> N raising degrees by k."""
    ring = M.ring
    if N.ring != ring:
        raise ValueError("modules over different rings")
    # unknown blocks X_d : M_d -> N_{d+k}
    layout = {}
    off = 0
    for d in M.degree_set():
        a, b = N.dim(d + k), M.dim(d)
        if a and b:
            layout[d] = (off, a, b)
            off += a * b
    nvar = off
    if nvar == 0:
        return []
    rows = []
    for j in range(M.ngens):
        for d in M.degree_set():
            tgt = N.block(d + k + 2)
            if tgt.stop == tgt.start:
                continue
            src = M.block(d)
            eq_rows = (tgt.stop - tgt.start) * (src.stop - src.start)
            pieces = []
            # X_{d+2} A_j[M_{d+2} <- M_d]
            if d + 2 in layout:
                o, a, b = layout[d + 2]
                A = M.actions[j][M.block(d + 2), src]
                An, ad = _int_form(ring, A)
            else:
                An, ad = None, 1
            if d in layout:
                o2, a2, b2 = layout[d]
                B = N.actions[j][tgt, N.block(d + k)]
                Bn, bd = _int_form(ring, B)
            else:
                Bn, bd = None, 1
            if An is not None and not np.any(An != 0):
                An = None
            if Bn is not None and not np.any(Bn != 0):
                Bn = None
            if An is None and Bn is None:
                continue
            row = np.zeros((eq_rows, nvar), dtype=object if (
                (An is not None and An.dtype == object) or (Bn is not None and Bn.dtype == object)) else np.int64)
            if An is not None:
                blk = _kron(np.eye(a, dtype=np.int64), np.ascontiguousarray(An.T))
                row[:, o:o + a * b] += blk * bd if bd != 1 else blk
            if Bn is not None:
                blk = _kron(Bn, np.eye(b2, dtype=np.int64))
                row[:, o2:o2 + a2 * b2] -= blk * ad if ad != 1 else blk
            pieces.append(row)
            rows.extend(pieces)
    if rows:
        if any(r.dtype == object for r in rows):
            system = np.concatenate([r.astype(object) for r in rows], axis=0)
        else:
            system = np.concatenate(rows, axis=0)
    else:
        system = np.zeros((0, nvar), dtype=np.int64)
    if ring.kind == "F":
        sysm = system % ring.ell if system.dtype != object else reduce_mod(system, ring.ell)
        kern = nullspace_mod(sysm, ring.ell) if system.shape[0] else np.eye(nvar, dtype=np.int64)
    else:
        if system.dtype != object and system.size and int(np.abs(system).max()) < 2**31:
            pass
        kern = rational_kernel(system) if system.shape[0] else np.eye(nvar, dtype=np.int64).astype(object)
        if ring.kind == "O" and kern.shape[1]:
            kern = saturate(kern, ring.ell)
        else:
            kern = _fractions(kern)
    out = []
    for c in range(kern.shape[1]):
        X = ring.zeros((N.rank, M.rank))
        for d, (o, a, b) in layout.items():
            X[N.block(d + k), M.block(d)] = kern[o:o + a * b, c].reshape(a, b)
        out.append(X)
    return out


def _fractions(k: np.ndarray) -> np.ndarray:
    out = np.empty(k.shape, dtype=object)
    for idx, x in np.ndenumerate(k):
        out[idx] = _to_fraction(x)
    return out


def graded_hom(M: GradedCModule, N: GradedCModule, degrees=None) -> GradedHomSpace:
    if degrees is None:
        if M.rank == 0 or N.rank == 0:
            degrees = []
        else:
            lo = int(N.degrees[0] - M.degrees[-1])
            hi = int(N.degrees[-1] - M.degrees[0])
            degrees = range(lo, hi + 1)
    basis = {}
    for k in degrees:
        b = hom_degree(M, N, k)
        if b:
            basis[k] = b
    return GradedHomSpace(M, N, basis)


# -- pairing, peeling, quotients ---------------------------------------------------------

def pairing_matrix(M: GradedCModule, D: GradedCModule, g: int, n: int):
    """Projections, inclusions and the residue pairing for D<n> against M.

    ``g`` indexes the one-dimensional lowest degree piece of D.
    """
    ring = M.ring
    incl = hom_degree(D, M, -n)
    if not incl:
        return [], [], None
    proj = hom_degree(M, D, n)
    if not proj:
        return proj, incl, None
    prow = np.stack([p[g, :] for p in proj]) if proj else None
    icol = np.stack([i[:, g] for i in incl], axis=1)
    G = ring.matmul(prow, icol)
    return proj, incl, G


def multiplicity(M: GradedCModule, D: GradedCModule, g: int, n: int) -> int:
    _, _, G = pairing_matrix(M, D, g, n)
    if G is None:
        return 0
    return _rank(M.ring, G)


def quotient_by_image(M: GradedCModule, I: np.ndarray, src_degrees: np.ndarray) -> GradedCModule:
    """M / im(I) for a split injective degree-0 map I from a graded free module."""
    ring = M.ring
    keep_by_deg = {}
    pivot_by_deg = {}
    T = {}
    for d in M.degree_set():
        rows = M.block(d)
        cols = np.flatnonzero(src_degrees == d)
        local = list(range(rows.stop - rows.start))
        if cols.size == 0:
            keep_by_deg[d] = [rows.start + i for i in local]
            pivot_by_deg[d] = []
            continue
        Id = I[rows, :][:, cols]
        piv = _pivots(ring, Id.T)
        if len(piv) != cols.size:
            raise PeelError(f"embedding not split in degree {d}")
        rest = [i for i in local if i not in set(piv)]
        inv = ring.inverse(Id[piv, :])
        T[d] = ring.matmul(Id[rest, :], inv) if rest else ring.zeros((0, len(piv)))
        keep_by_deg[d] = [rows.start + i for i in rest]
        pivot_by_deg[d] = [rows.start + i for i in piv]
    for d in M.degree_set():
        if d not in src_degrees and np.any(src_degrees == d):
            pass
    keep = [i for d in M.degree_set() for i in keep_by_deg[d]]
    pos = {i: a for a, i in enumerate(keep)}
    new_acts = []
    for A in M.actions:
        B = ring.zeros((len(keep), len(keep)))
        for d in M.degree_set():
            q0 = keep_by_deg[d]
            if not q0 or (d + 2) not in keep_by_deg:
                continue
            q2 = keep_by_deg[d + 2]
            if not q2:
                continue
            blk = A[np.ix_(q2, q0)]
            r2 = pivot_by_deg[d + 2]
            if r2:
                blk = ring.sub(blk, ring.matmul(T[d + 2], A[np.ix_(r2, q0)]))
            B[np.ix_([pos[i] for i in q2], [pos[i] for i in q0])] = blk
        new_acts.append(B)
    return GradedCModule(ring, M.degrees[keep], new_acts)


def _invertible_minor(ring: CoefRing, G: np.ndarray, m: int) -> tuple[list[int], list[int]]:
    rows = _pivots(ring, G.T)[:m]
    cols = _pivots(ring, G[rows, :])[:m]
    return rows, cols


def peel(M: GradedCModule, D: GradedCModule, g: int, n: int, count: int | None = None):
    """Split off copies of D<n>; returns (remainder, number peeled)."""
    ring = M.ring
    proj, incl, G = pairing_matrix(M, D, g, n)
    if G is None:
        return M, 0
    m = _rank(ring, G)
    if count is not None:
        m = min(m, count)
    if m == 0:
        return M, 0
    rows, cols = _invertible_minor(ring, G, m)
    I = np.concatenate([incl[b] for b in cols], axis=1)
    P = np.concatenate([proj[a] for a in rows], axis=0)
    phi = ring.matmul(P, I)
    if _rank(ring, phi) != phi.shape[0]:
        raise PeelError("p o i is not invertible although the pairing is")
    src_degrees = np.concatenate([D.degrees - n] * m)
    return quotient_by_image(M, I, src_degrees), m


def peel_summand(M: GradedCModule, D: GradedCModule, n: int, g: int = 0, budget: int | None = None):
    """Split off one copy of D<n>; returns (remainder, success)."""
    if budget is not None and budget <= 0:
        raise PeelError("peel budget exhausted", budget=True)
    rem, m = peel(M, D, g, n, count=1)
    return rem, m == 1


# -- indecomposability -----------------------------------------------------------

def _span_basis(ring: CoefRing, mats: list[np.ndarray]) -> list[np.ndarray]:
    """A basis of the span of matrices (over the residue field)."""
    if not mats:
        return []
    shape = mats[0].shape
    flat = np.stack([m.reshape(-1) for m in mats])
    if ring.kind == "F":
        from ._kernels import rref_mod

        r, _ = rref_mod(flat % ring.ell, ring.ell)
        return [row.reshape(shape) for row in r]
    num, _ = integerize(flat)
    r, _ = rational_rref(num)
    return [row.reshape(shape) for row in r]


def local_endomorphisms(M: GradedCModule, g: int = 0) -> dict:
    """Check that End^0(M) is local over a field, via the lowest degree line.

    The degree-0 endomorphisms act on the one-dimensional lowest piece by a
    scalar; the kernel of this character is an ideal, and End^0 is local iff
    that ideal is nilpotent.
    """
    ring = M.ring
    if ring.kind == "O":
        raise ValueError("certify over the residue field")
    if M.dim(int(M.degrees[0])) != 1 or g != 0:
        return {"local": False, "reason": "lowest degree piece is not a line"}
    ends = hom_degree(M, M, 0)
    lam = [_residue_scalar(ring, e[g, g]) for e in ends]
    i0 = next((i for i, x in enumerate(lam) if x), None)
    if i0 is None:
        return {"local": False, "reason": "identity acts by zero on the lowest line"}
    K = []
    for i, e in enumerate(ends):
        if i == i0:
            continue
        if ring.kind == "F":
            c = lam[i] * pow(lam[i0], -1, ring.ell) % ring.ell
            K.append((e - c * ends[i0]) % ring.ell)
        else:
            c = Fraction(lam[i]) / lam[i0]
            K.append(e - ends[i0] * c)
    K = _span_basis(ring, K)
    power = K
    steps = 0
    while power:
        prods = [ring.matmul(a, b) for a in power for b in K]
        nxt = _span_basis(ring, [p for p in prods if not ring.is_zero(p)])
        steps += 1
        if len(nxt) >= len(power) and nxt:
            return {"local": False, "reason": "kernel of the residue character is not nilpotent",
                    "end0": len(ends)}
        power = nxt
    return {"local": True, "end0": len(ends), "radical_dim": len(K), "nilpotency": steps + 1}


# -- the library of indecomposables -------------------------------------------------

@dataclass
class PeelRecord:
    w: int
    summands: list[tuple[int, int, int]]  # (x, shift, multiplicity)


@dataclass
class DecompRecord:
    """Summands (label, shift, multiplicity) of a module."""

    summands: list[tuple[int, int, int]]
    graded_rank_ok: bool


@dataclass
class IndecomposableTable:
    datum: RootDatum
    ring: CoefRing
    weyl: WeylGroup
    C: CoinvariantAlgebra
    modules: dict[int, GradedCModule]
    records: dict[int, PeelRecord] = field(default_factory=dict)
    certificates: dict[int, dict] = field(default_factory=dict)

    def __getitem__(self, w) -> GradedCModule:
        return self.modules[w if isinstance(w, int) else w.index]

    def lowest(self, w) -> int:
        return 0

    def to_json_obj(self) -> dict:
        g = self.weyl
        return {
            "schema": "soergelcalc.indecomposables/v1",
            "preset": self.datum.preset_tag,
            "ring": self.ring.name,
            "modules": {word_str(g[w].word): m.to_json_obj() for w, m in sorted(self.modules.items())},
            "records": {
                word_str(g[w].word): [[word_str(g[x].word), n, k] for x, n, k in r.summands]
                for w, r in sorted(self.records.items())
            },
        }

    @classmethod
    def from_json_obj(cls, obj: dict, datum: RootDatum, weyl: WeylGroup, C: CoinvariantAlgebra):
        from .rootdata import parse_word

        ring = CoefRing.parse(obj["ring"])
        mods = {weyl.from_word(parse_word(k)).index: GradedCModule.from_json_obj(v) for k, v in obj["modules"].items()}
        recs = {}
        for k, v in obj["records"].items():
            w = weyl.from_word(parse_word(k)).index
            recs[w] = PeelRecord(w, [(weyl.from_word(parse_word(x)).index, n, m) for x, n, m in v])
        return cls(datum, ring, weyl, C, mods, recs)


def shift_candidates(lw: int, lx: int):
    d = lw - lx
    return range(-d, d + 1, 2)


def decompose(M: GradedCModule, table: IndecomposableTable, candidates=None) -> DecompRecord:
    """Multiplicities of every known D_x<n> in M via pairing ranks."""
    summands = []
    total = LaurentPoly()
    lo = int(M.degrees[0]) if M.rank else 0
    hi = int(M.degrees[-1]) if M.rank else 0
    for x in (candidates if candidates is not None else sorted(table.modules)):
        D = table.modules[x]
        lx = table.weyl[x].length
        for n in range(-lx - hi, -lx - lo + 1):
            # lowest degree of D<n> is -lx - n and must lie inside M
            m = multiplicity(M, D, 0, n)
            if m:
                summands.append((x, n, m))
                total = total + D.shift(n).graded_rank() * LaurentPoly.const(m)
    return DecompRecord(summands, total == M.graded_rank())


def build_indecomposables(
    datum: RootDatum,
    ring: CoefRing,
    weyl: WeylGroup | None = None,
    C: CoinvariantAlgebra | None = None,
    budget_peel: int | None = None,
    certify: bool = True,
    validate: bool = True,
    progress=None,
) -> IndecomposableTable:
    """D_w for every w, by induction on length.

    ``budget_peel`` caps the number of summands split off while building any
    single D_w.  ``certify`` checks locality of End^0 (over Z_(l) on the
    reduction mod l).
    """
    if ring.kind != "Q":
        check_prime(datum, ring.ell)
    weyl = weyl or WeylGroup(datum)
    C = C or build_coinvariants(datum, ring, weyl)
    mods: dict[int, GradedCModule] = {0: unit_module(C)}
    table = IndecomposableTable(datum, ring, weyl, C, mods)
    table.records[0] = PeelRecord(0, [])
    bruhat = weyl.bruhat_matrix
    for w in weyl.elements[1:]:
        s = w.word[-1]
        y = int(weyl.rmul[s, w.index])
        M = bs_extend(mods[y], s, datum)
        peeled = []
        used = 0
        lower = [x for x in range(len(weyl)) if bruhat[x, w.index] and x != w.index]
        lower.sort(key=lambda x: (-weyl[x].length, weyl[x].word))
        for x in lower:
            for n in shift_candidates(w.length, weyl[x].length):
                M, m = peel(M, mods[x], 0, n)
                if m:
                    used += m
                    if budget_peel is not None and used > budget_peel:
                        raise PeelError(f"peel budget {budget_peel} exceeded at {w}", budget=True)
                    peeled.append((x, n, m))
        if M.dim(-w.length) != 1 or int(M.degrees[0]) != -w.length:
            raise PeelError(f"remainder for {w} does not start with a line in degree {-w.length}")
        if validate:
            M.validate(C)
        mods[w.index] = M
        table.records[w.index] = PeelRecord(w.index, peeled)
        if progress:
            progress(w, M)
    if certify:
        for w, M in mods.items():
            cert = certify_module(M)
            table.certificates[w] = cert
            if not cert["local"]:
                raise PeelError(f"D_{weyl[w]} is decomposable: {cert.get('reason')}")
    return table


def certify_module(M: GradedCModule) -> dict:
    if M.ring.kind == "O":
        return local_endomorphisms(M.base_change(CoefRing.prime_field(M.ring.ell)))
    return local_endomorphisms(M)


def isomorphic_to_indecomposable(M: GradedCModule, D: GradedCModule, n: int = 0) -> bool:
    """M is isomorphic to D<n> (D indecomposable with a line at the bottom)."""
    if M.rank != D.rank:
        return False
    if M.graded_rank() != D.shift(n).graded_rank():
        return False
    return multiplicity(M, D, 0, n) == 1


def base_change_module(M: GradedCModule, target: CoefRing) -> GradedCModule:
    return M.base_change(target)
