"""Memoised computations per (preset, ring) and the on-disk cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from filelock import FileLock

from . import __version__
from .charcalc import (
    DecompMatrices,
    HomRankTable,
    MultTables,
    StalkTable,
    build_stalk_table,
    composition_multiplicities,
    decomposition_matrix_E,
    euler_inverse,
    hom_rank_table,
    tilting_checks,
    tilting_multiplicities,
)
from .coinvariant import CoinvariantAlgebra, build_coinvariants
from .hecke import KLTable, kl_basis
from .linalg import CoefRing
from .rootdata import DEFAULT_MAX_WEYL, RootDatum, WeylGroup, build_root_datum, check_prime
from .soergel import IndecomposableTable, build_indecomposables

log = logging.getLogger(__name__)

CACHE_SCHEMA = "soergelcalc.cache/v1"


def engine_hash() -> str:
    """Digest of the package sources; part of every cache key."""
    h = hashlib.sha256(__version__.encode())
    pkg = Path(__file__).parent
    for p in sorted(pkg.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:16]


class ModuleCache:
    """Write-once JSON cache of indecomposable tables; advisory only."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.engine = engine_hash()

    def path(self, preset: str, ring: CoefRing) -> Path:
        return self.root / f"{CACHE_SCHEMA.replace('/', '-')}_{preset}_{ring.name}_{self.engine}.json"

    def load(self, preset: str, ring: CoefRing, datum, weyl, C) -> IndecomposableTable | None:
        p = self.path(preset, ring)
        if not p.exists():
            return None
        with FileLock(str(p) + ".lock"):
            try:
                obj = json.loads(p.read_text())
                if obj.get("schema") != CACHE_SCHEMA or obj.get("engine") != self.engine:
                    raise ValueError("stale cache entry")
                table = IndecomposableTable.from_json_obj(obj["table"], datum, weyl, C)
                if len(table.modules) != len(weyl) or table.ring != ring:
                    raise ValueError("incomplete cache entry")
                for M in table.modules.values():
                    M.validate(C)
                return table
            except Exception as exc:  # corrupted entries are rebuilt
                log.warning("discarding cache entry %s: %s", p.name, exc)
                p.unlink(missing_ok=True)
                return None

    def store(self, preset: str, table: IndecomposableTable) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        p = self.path(preset, table.ring)
        with FileLock(str(p) + ".lock"):
            tmp = p.with_suffix(".tmp")
            obj = {"schema": CACHE_SCHEMA, "engine": self.engine, "table": table.to_json_obj()}
            tmp.write_text(json.dumps(obj, sort_keys=True))
            os.replace(tmp, p)


@dataclass
class RingResults:
    table: IndecomposableTable
    homs: HomRankTable
    stalks: StalkTable
    mult: MultTables


class Engine:
    def __init__(self, max_weyl: int = DEFAULT_MAX_WEYL, budget_peel: int | None = None,
                 cache: ModuleCache | None = None):
        self.max_weyl = max_weyl
        self.budget_peel = budget_peel
        self.cache = cache
        self._memo: dict = {}

    def _get(self, key, build):
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    def datum(self, preset: str) -> RootDatum:
        return self._get(("datum", preset), lambda: build_root_datum(preset))

    def weyl(self, preset: str) -> WeylGroup:
        return self._get(("weyl", preset), lambda: WeylGroup(self.datum(preset), self.max_weyl))

    def kl(self, preset: str) -> KLTable:
        return self._get(("kl", preset), lambda: kl_basis(self.weyl(preset)))

    def coinvariants(self, preset: str, ring: CoefRing) -> CoinvariantAlgebra:
        def build():
            if ring.kind != "Q":
                check_prime(self.datum(preset), ring.ell)
            return build_coinvariants(self.datum(preset), ring, self.weyl(preset))

        return self._get(("C", preset, ring), build)

    def indecomposables(self, preset: str, ring: CoefRing) -> IndecomposableTable:
        def build():
            datum, weyl = self.datum(preset), self.weyl(preset)
            C = self.coinvariants(preset, ring)
            if self.cache is not None:
                hit = self.cache.load(preset, ring, datum, weyl, C)
                if hit is not None:
                    log.info("cache hit %s %s", preset, ring.name)
                    return hit
            table = build_indecomposables(datum, ring, weyl, C, budget_peel=self.budget_peel)
            if self.cache is not None:
                self.cache.store(preset, table)
            return table

        return self._get(("D", preset, ring), build)

    def results(self, preset: str, ring: CoefRing) -> RingResults:
        def build():
            table = self.indecomposables(preset, ring)
            homs = hom_rank_table(table)
            stalks = build_stalk_table(self.datum(preset), homs)
            tilt, homT = tilting_multiplicities(homs)
            comp = composition_multiplicities(tilt, table.weyl)
            euler, euler_rep = euler_inverse(comp, table.weyl)
            mult = MultTables(table.weyl, tilt, comp, homT, euler)
            mult.reports["tilting"] = tilting_checks(tilt, homT, stalks)
            mult.reports["euler_inverse"] = euler_rep
            return RingResults(table, homs, stalks, mult)

        return self._get(("R", preset, ring), build)

    def decomposition(self, preset: str, ell: int) -> DecompMatrices:
        def build():
            return decomposition_matrix_E(
                self.indecomposables(preset, CoefRing.local_integers(ell)),
                self.indecomposables(preset, CoefRing.rationals()),
                self.indecomposables(preset, CoefRing.prime_field(ell)),
            )

        return self._get(("E", preset, ell), build)
