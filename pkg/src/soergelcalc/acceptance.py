"""The acceptance suite run by ``soergelcalc selftest``.

Each criterion returns a JSON-friendly dict with an ``id``, a ``name``, a
boolean ``pass`` and details.  Nothing time-dependent goes into the result so
repeated runs serialise to identical bytes.
"""

from __future__ import annotations

import filecmp
import logging
import tempfile
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .charcalc import calibration_check, pairing_identity_check, self_duality_check, symmetry_check
from .coinvariant import base_change_report
from .hecke import kl_inversion_check
from .linalg import CoefRing
from .pipeline import Engine
from .rootdata import WeylGroup, build_root_datum
from .soergel import bs_module, certify_module, graded_hom, isomorphic_to_indecomposable

log = logging.getLogger(__name__)

DEFAULT_RATIONAL = ("A1", "A2", "A3", "B2", "G2")
DEFAULT_MODULAR = (("A1", 3), ("A2", 5), ("A2", 2), ("B2", 3), ("B2", 5), ("G2", 5), ("GL3", 2))
COINVARIANT_JOBS = (("A2", 5), ("B2", 3), ("G2", 5), ("GL3", 2))
INVERSION_PRESETS = ("A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2", "GL2", "GL3", "GL4")
HOM_BASE_CHANGE_JOB = ("B2", 3, 4)
INDECOMPOSABLE_JOBS = (("A2", 2), ("A2", 5), ("B2", 3), ("B2", 5))


@dataclass
class SuiteConfig:
    rational: tuple = DEFAULT_RATIONAL
    modular: tuple = DEFAULT_MODULAR
    coinvariant: tuple = COINVARIANT_JOBS
    inversion: tuple = INVERSION_PRESETS
    hom_base_change: tuple | None = HOM_BASE_CHANGE_JOB
    indecomposable: tuple = INDECOMPOSABLE_JOBS
    determinism: bool = True
    determinism_config: dict = field(default_factory=lambda: {"presets": ["A2"], "primes": [5]})

    def runs(self) -> list[tuple[str, CoefRing]]:
        out = [(p, CoefRing.rationals()) for p in self.rational]
        for p, ell in self.modular:
            out.append((p, CoefRing.local_integers(ell)))
            out.append((p, CoefRing.prime_field(ell)))
        return out


def _label(preset: str, ring: CoefRing) -> str:
    return f"{preset}/{ring.name}"


def _summarise(name: str, cid: int, results: dict) -> dict:
    ok = all(r["pass"] for r in results.values())
    failed = sorted(k for k, r in results.items() if not r["pass"])
    return {"id": cid, "name": name, "pass": ok, "runs": len(results), "failed": failed, "details": results}


def criterion_calibration(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p in cfg.rational:
        r = engine.results(p, CoefRing.rationals())
        res[p] = calibration_check(r.stalks, engine.kl(p))
    return _summarise("char-0 calibration against the KL recursion", 1, res)


def criterion_pairing(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ring in cfg.runs():
        r = engine.results(p, ring)
        res[_label(p, ring)] = pairing_identity_check(r.stalks, r.homs)
    return _summarise("pairing identity for Hom ranks", 2, res)


def criterion_recursions(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ring in cfg.runs():
        res[_label(p, ring)] = engine.results(p, ring).mult.reports["tilting"]
    return _summarise("tilting recursion, round trip and stalk identity", 3, res)


def criterion_coinvariant(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ell in cfg.coinvariant:
        rep = base_change_report(engine.datum(p), ell, engine.weyl(p))
        res[f"{p}/l={ell}"] = {"pass": rep["pass"], "checks": rep["checks"]}
    return _summarise("coinvariant algebra: rank, freeness over C_s, base change", 4, res)


def hom_base_change(preset: str, ell: int, max_len: int, engine: Engine) -> dict:
    """Hom over Z_(l) between Bott-Samelson modules reduces to Hom over F_l."""
    O, F = CoefRing.local_integers(ell), CoefRing.prime_field(ell)
    CO, CF = engine.coinvariants(preset, O), engine.coinvariants(preset, F)
    r = engine.datum(preset).num_simple
    seqs = [s for n in range(max_len + 1) for s in product(range(r), repeat=n)]
    MO = {s: bs_module(s, CO) for s in seqs}
    MF = {s: bs_module(s, CF) for s in seqs}
    checked, bad = 0, None
    for a in seqs:
        for b in seqs:
            ho, hf = graded_hom(MO[a], MO[b]), graded_hom(MF[a], MF[b])
            ok = ho.graded_rank == hf.graded_rank
            # reduction of the Z_(l) basis stays independent in every degree
            for k, basis in ho.basis.items():
                flat = np.stack([O.residue(m).reshape(-1) for m in basis])
                ok &= F.residue_rank(flat) == len(basis)
            checked += 1
            if not ok and bad is None:
                bad = {"source": list(a), "target": list(b), "O": str(ho.graded_rank), "F": str(hf.graded_rank)}
    return {"pass": bad is None, "checked": checked, "counterexample": bad}


def criterion_hom_base_change(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    if cfg.hom_base_change:
        p, ell, n = cfg.hom_base_change
        res[f"{p}/l={ell}/len<={n}"] = hom_base_change(p, ell, n, engine)
    return _summarise("Hom between Bott-Samelson modules commutes with reduction", 5, res)


def criterion_indecomposable(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ell in cfg.indecomposable:
        O, F = CoefRing.local_integers(ell), CoefRing.prime_field(ell)
        tO, tF = engine.indecomposables(p, O), engine.indecomposables(p, F)
        g = tO.weyl
        bad = None
        for w in range(len(g)):
            red = tO.modules[w].base_change(F)
            cert = certify_module(red)
            if not cert["local"] or not isomorphic_to_indecomposable(red, tF.modules[w]):
                bad = {"w": str(g[w]), "local": cert["local"]}
                break
        dec = engine.decomposition(p, ell)
        unitri = dec.reports["unitriangular"]["pass"]
        res[f"{p}/l={ell}"] = {
            "pass": bad is None and unitri and all(r["pass"] for r in dec.reports.values()),
            "checked": len(g),
            "counterexample": bad,
            "E_unitriangular": unitri,
            "E_is_identity": all((v == w) == (m == 1) for (v, w), m in dec.E.items()) and len(dec.E) == len(g),
        }
    return _summarise("reduction of integral indecomposables; E matrix shape", 6, res)


def criterion_inversion(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p in cfg.inversion:
        if len(engine.weyl(p)) > 48:
            continue
        res[p] = kl_inversion_check(engine.kl(p))
    return _summarise("KL inversion formula", 7, res)


def criterion_duality(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ring in cfg.runs():
        st = engine.results(p, ring).stalks
        a, b = self_duality_check(st), symmetry_check(st)
        res[_label(p, ring)] = {"pass": a["pass"] and b["pass"], "palindromic": a, "inverse_symmetry": b}
    return _summarise("palindromic stalks and inverse symmetry", 8, res)


def criterion_euler(engine: Engine, cfg: SuiteConfig) -> dict:
    res = {}
    for p, ring in cfg.runs():
        res[_label(p, ring)] = engine.results(p, ring).mult.reports["euler_inverse"]
    return _summarise("composition matrix is unimodular with exact inverse", 9, res)


def criterion_determinism(cfg: SuiteConfig) -> dict:
    from .cli import JobConfig, emit_all

    if not cfg.determinism:
        return {"id": 10, "name": "byte-identical repeated runs", "pass": True, "runs": 0,
                "failed": [], "details": {"skipped": True}}
    with tempfile.TemporaryDirectory() as tmp:
        dirs = []
        for i in range(2):
            out = Path(tmp) / f"run{i}"
            job = JobConfig(presets=list(cfg.determinism_config["presets"]),
                            primes=list(cfg.determinism_config["primes"]),
                            rings=["K", "O", "F"], out=out, cache=False)
            emit_all(job, selftest=True)
            dirs.append(out)
        files = sorted(str(p.relative_to(dirs[0])) for p in dirs[0].rglob("*") if p.is_file())
        other = sorted(str(p.relative_to(dirs[1])) for p in dirs[1].rglob("*") if p.is_file())
        same = files == other and all(filecmp.cmp(dirs[0] / f, dirs[1] / f, shallow=False) for f in files)
    return {"id": 10, "name": "byte-identical repeated runs", "pass": same and bool(files),
            "runs": 2, "failed": [] if same else ["outputs differ"], "details": {"files": files}}


CRITERIA = (
    criterion_calibration,
    criterion_pairing,
    criterion_recursions,
    criterion_coinvariant,
    criterion_hom_base_change,
    criterion_indecomposable,
    criterion_inversion,
    criterion_duality,
    criterion_euler,
)


def run_suite(engine: Engine | None = None, cfg: SuiteConfig | None = None, only=None) -> list[dict]:
    engine = engine or Engine()
    cfg = cfg or SuiteConfig()
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        log.info("criterion %d", i)
        try:
            out.append(fn(engine, cfg))
        except Exception as exc:  # failures are data
            out.append({"id": i, "name": fn.__name__, "pass": False, "runs": 0,
                        "failed": [type(exc).__name__], "details": {"error": str(exc)}})
    if not only or 10 in only:
        try:
            out.append(criterion_determinism(cfg))
        except Exception as exc:
            out.append({"id": 10, "name": "byte-identical repeated runs", "pass": False, "runs": 0,
                        "failed": [type(exc).__name__], "details": {"error": str(exc)}})
    return out


def format_line(res: dict) -> str:
    status = "PASS" if res["pass"] else "FAIL"
    extra = f" failed={','.join(res['failed'])}" if res["failed"] else ""
    return f"[{status}] criterion {res['id']:2d}: {res['name']} ({res['runs']} runs){extra}"
