"""Command-line front end.

    soergelcalc klpoly   --preset A3
    soergelcalc pcan     --preset B2 --prime 3,5 --ring K,O,F
    soergelcalc mult     --preset A2 --prime 5
    soergelcalc decomp   --preset B2 --prime 3
    soergelcalc selftest [--config FILE]

Exit codes: 0 all checks passed, 1 an invariant failed, 2 configuration error.
Cartan matrices use <alpha_i, alpha_j^vee> with Bourbaki numbering, so G2 is
[[2, -1], [-3, 2]] (alpha_1 short).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .acceptance import SuiteConfig, format_line, run_suite
from .charcalc import (
    InvariantFailure,
    _header,
    calibration_check,
    dumps,
    int_table_csv,
    int_table_json,
    pairing_identity_check,
    poly_json,
    self_duality_check,
    stalk_csv,
    stalk_json,
    symmetry_check,
)
from .coinvariant import CoinvariantError
from .hecke import kl_inversion_check
from .linalg import CoefRing, is_prime
from .pipeline import Engine, ModuleCache
from .rootdata import (
    DEFAULT_MAX_WEYL,
    BadPrime,
    UnsupportedPreset,
    WeylCapExceeded,
    build_root_datum,
    check_prime,
    parse_preset,
    word_str,
)
from .soergel import ModuleInvariantError, PeelError

log = logging.getLogger("soergelcalc")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("klpoly", "pcan", "mult", "decomp", "selftest")


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    presets: list[str] = field(default_factory=list)
    primes: list[int] = field(default_factory=list)
    rings: list[str] = field(default_factory=lambda: ["K", "O", "F"])
    commands: list[str] = field(default_factory=list)
    out: Path = Path("soergelcalc-out")
    cache: bool = True
    cache_dir: Path | None = None
    budget_peel: int | None = None
    max_weyl: int = DEFAULT_MAX_WEYL

    def validate(self, need_preset: bool = True) -> None:
        if need_preset and not self.presets:
            raise ConfigError("no preset given (use --preset, e.g. --preset A2)")
        bad = [r for r in self.rings if r not in ("K", "O", "F")]
        if bad:
            raise ConfigError(f"unknown ring(s) {bad}; choose from K, O, F")
        for ell in self.primes:
            if not is_prime(ell):
                raise ConfigError(f"{ell} is not prime")
        for p in self.presets:
            try:
                parse_preset(p)
                datum = build_root_datum(p)
            except UnsupportedPreset as exc:
                raise ConfigError(str(exc)) from exc
            for ell in self.primes:
                try:
                    check_prime(datum, ell)
                except BadPrime as exc:
                    raise ConfigError(str(exc)) from exc
        if self.budget_peel is not None and self.budget_peel < 0:
            raise ConfigError("--budget-peel must be non-negative")
        if self.max_weyl < 1:
            raise ConfigError("--max-weyl must be positive")

    def ring_objects(self) -> list[CoefRing]:
        out = []
        if "K" in self.rings:
            out.append(CoefRing.rationals())
        for ell in self.primes:
            if "O" in self.rings:
                out.append(CoefRing.local_integers(ell))
            if "F" in self.rings:
                out.append(CoefRing.prime_field(ell))
        return out

    def engine(self) -> Engine:
        cache = None
        if self.cache:
            cache = ModuleCache(self.cache_dir or (self.out / ".cache"))
        return Engine(max_weyl=self.max_weyl, budget_peel=self.budget_peel, cache=cache)


def _split(v: str) -> list[str]:
    return [x.strip() for x in v.split(",") if x.strip()]


def _bool(v: str) -> bool:
    t = v.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _int(v, name):
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {v!r}") from None


def build_job(args: argparse.Namespace) -> JobConfig:
    conf = read_config(args.config) if args.config else {}
    known = {"preset", "presets", "prime", "primes", "ring", "rings", "out", "cache", "cache_dir",
             "budget_peel", "max_weyl"}
    unknown = sorted(set(conf) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    job = JobConfig(commands=[args.command])
    presets = args.preset or conf.get("preset") or conf.get("presets")
    if presets:
        job.presets = [p.upper() for p in _split(presets)]
    primes = args.prime or conf.get("prime") or conf.get("primes")
    if primes:
        job.primes = [_int(x, "prime") for x in _split(primes)]
    rings = args.ring or conf.get("ring") or conf.get("rings")
    if rings:
        job.rings = [r.upper() if r.upper() != "Q" else "K" for r in _split(rings)]
    out = args.out or conf.get("out")
    if out:
        job.out = Path(out)
    if "cache" in conf:
        job.cache = _bool(conf["cache"])
    if args.no_cache:
        job.cache = False
    if conf.get("cache_dir"):
        job.cache_dir = Path(conf["cache_dir"])
    bp = args.budget_peel if args.budget_peel is not None else conf.get("budget_peel")
    if bp is not None:
        job.budget_peel = _int(bp, "budget_peel")
    mw = args.max_weyl if args.max_weyl is not None else conf.get("max_weyl")
    if mw is not None:
        job.max_weyl = _int(mw, "max_weyl")
    return job


# -- commands ------------------------------------------------------------------------

def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _ring_tag(ring: CoefRing) -> str:
    return "K" if ring.kind == "Q" else ring.name


def cmd_klpoly(job: JobConfig, engine: Engine) -> bool:
    ok = True
    for p in job.presets:
        kl = engine.kl(p)
        g = kl.group
        obj = {"schema_version": "charcalc/v1", "kind": "klpoly", "preset": p,
               "elements": [word_str(x.word) for x in g]}
        obj["entries"] = {
            f"{word_str(g[x].word)}|{word_str(g[w].word)}": {"h_v": poly_json(kl.hpoly(x, w)),
                                                              "P_q": kl.P(x, w).to_list()[1]}
            for x, w in kl.pairs()
        }
        rep = kl_inversion_check(kl)
        ok &= rep["pass"]
        d = job.out / p
        _write(d / "klpoly.json", dumps(obj))
        lines = ["x,w,P_q"] + [f"{word_str(g[x].word)},{word_str(g[w].word)},{' '.join(map(str, kl.P(x, w).to_list()[1]))}"
                               for x, w in kl.pairs()]
        _write(d / "klpoly.csv", "\n".join(lines) + "\n")
        _write(d / "kl_inversion.json", dumps({"schema_version": "charcalc/v1", "preset": p, **rep}))
        print(f"klpoly {p}: {len(kl.h)} entries, inversion {'pass' if rep['pass'] else 'FAIL'}")
    return ok


def cmd_pcan(job: JobConfig, engine: Engine) -> bool:
    ok = True
    for p in job.presets:
        for ring in job.ring_objects():
            r = engine.results(p, ring)
            tag = _ring_tag(ring)
            reports = {
                "pairing_identity": pairing_identity_check(r.stalks, r.homs),
                "self_duality": self_duality_check(r.stalks),
                "inverse_symmetry": symmetry_check(r.stalks),
            }
            if ring.kind == "Q":
                reports["calibration"] = calibration_check(r.stalks, engine.kl(p))
            passed = all(x["pass"] for x in reports.values())
            ok &= passed
            d = job.out / p
            _write(d / f"pcan_{tag}.json", dumps(stalk_json(r.stalks)))
            _write(d / f"pcan_{tag}.csv", stalk_csv(r.stalks))
            _write(d / f"pcan_{tag}_report.json",
                   dumps({**_header(r.stalks.datum, ring, "pcan_report"), "reports": reports}))
            print(f"pcan {p} {tag}: {len(r.stalks.h)} stalk polynomials, {'pass' if passed else 'FAIL'}")
    return ok


def cmd_mult(job: JobConfig, engine: Engine) -> bool:
    ok = True
    for p in job.presets:
        for ring in job.ring_objects():
            r = engine.results(p, ring)
            m = r.mult
            datum, g = engine.datum(p), m.weyl
            reports = dict(m.reports)
            reports["inverse_symmetry"] = symmetry_check(r.stalks)
            passed = all(x["pass"] for x in reports.values())
            ok &= passed
            tag = _ring_tag(ring)
            d = job.out / p
            obj = {
                **_header(datum, ring, "mult"),
                "elements": [word_str(x.word) for x in g],
                "tilt": int_table_json(datum, ring, g, "tilt", m.tilt)["entries"],
                "comp": int_table_json(datum, ring, g, "comp", m.comp)["entries"],
                "homrank": int_table_json(datum, ring, g, "homrank", m.homrank)["entries"],
                "euler_inverse": int_table_json(datum, ring, g, "euler", m.euler)["entries"],
                "reports": reports,
            }
            _write(d / f"mult_{tag}.json", dumps(obj))
            _write(d / f"tilt_{tag}.csv", int_table_csv(g, m.tilt, ("w", "v", "tilt")))
            _write(d / f"comp_{tag}.csv", int_table_csv(g, m.comp, ("w", "v", "comp")))
            print(f"mult {p} {tag}: {'pass' if passed else 'FAIL'}")
    return ok


def cmd_decomp(job: JobConfig, engine: Engine) -> bool:
    ok = True
    if not job.primes:
        raise ConfigError("decomp needs at least one prime (--prime)")
    for p in job.presets:
        for ell in job.primes:
            dec = engine.decomposition(p, ell)
            datum, g = engine.datum(p), dec.weyl
            passed = all(x["pass"] for x in dec.reports.values())
            ok &= passed
            obj = {
                "schema_version": "charcalc/v1",
                "kind": "decomp",
                "preset": p,
                "prime": ell,
                "elements": [word_str(x.word) for x in g],
                "provenance": dec.provenance,
                "E": int_table_json(datum, CoefRing.local_integers(ell), g, "E", dec.E)["entries"],
                "T": int_table_json(datum, CoefRing.local_integers(ell), g, "T", dec.T)["entries"],
                "P": int_table_json(datum, CoefRing.local_integers(ell), g, "P", dec.P)["entries"],
                "I": int_table_json(datum, CoefRing.local_integers(ell), g, "I", dec.I)["entries"],
                "reports": dec.reports,
            }
            _write(job.out / p / f"decomp_l{ell}.json", dumps(obj))
            print(f"decomp {p} l={ell}: {'pass' if passed else 'FAIL'}")
    return ok


def suite_config_for(job: JobConfig) -> SuiteConfig:
    if not job.presets:
        return SuiteConfig()
    modular = tuple((p, ell) for p in job.presets for ell in job.primes)
    small = tuple(j for j in modular if len(build_root_datum(j[0]).simple_roots) <= 2)
    return SuiteConfig(
        rational=tuple(job.presets),
        modular=modular,
        coinvariant=modular,
        inversion=tuple(job.presets),
        hom_base_change=(small[0][0], small[0][1], 2) if small else None,
        indecomposable=small,
        determinism=False,
    )


def cmd_selftest(job: JobConfig, engine: Engine, determinism: bool = True) -> bool:
    cfg = suite_config_for(job)
    if job.presets:
        cfg.determinism = determinism
        cfg.determinism_config = {"presets": job.presets[:1], "primes": job.primes[:1]}
    else:
        cfg.determinism = determinism
    results = run_suite(engine, cfg)
    for res in results:
        print(format_line(res))
    ok = all(r["pass"] for r in results)
    _write(job.out / "selftest.json", dumps({"schema_version": "charcalc/v1", "kind": "selftest",
                                             "pass": ok, "criteria": results}))
    return ok


def emit_all(job: JobConfig, selftest: bool = False) -> bool:
    """Every table command, plus (optionally) a selftest without the determinism rerun."""
    engine = job.engine()
    ok = cmd_klpoly(job, engine)
    ok &= cmd_pcan(job, engine)
    ok &= cmd_mult(job, engine)
    if job.primes and ("O" in job.rings or "F" in job.rings):
        ok &= cmd_decomp(job, engine)
    if selftest:
        ok &= cmd_selftest(job, engine, determinism=False)
    return ok


DISPATCH = {
    "klpoly": cmd_klpoly,
    "pcan": cmd_pcan,
    "mult": cmd_mult,
    "decomp": cmd_decomp,
    "selftest": cmd_selftest,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soergelcalc", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--preset", help="comma separated labels such as A2, B3, GL3, G2")
        sp.add_argument("--prime", help="comma separated good primes")
        sp.add_argument("--ring", help="subset of K,O,F (default all)")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--config", help="key = value file mirroring the flags")
        sp.add_argument("--no-cache", action="store_true", help="ignore and do not write the module cache")
        sp.add_argument("--budget-peel", type=int, default=None,
                        help="cap on summands split off while building one indecomposable")
        sp.add_argument("--max-weyl", type=int, default=None, help=f"cap on |W| (default {DEFAULT_MAX_WEYL})")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        job = build_job(args)
        job.validate(need_preset=args.command != "selftest")
        if args.command != "selftest" and args.command != "klpoly" and not job.ring_objects():
            raise ConfigError("no ring selected: give --prime for O/F or include K")
        ok = DISPATCH[args.command](job, job.engine())
    except (ConfigError, WeylCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantFailure, PeelError, CoinvariantError, ModuleInvariantError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
