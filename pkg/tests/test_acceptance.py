"""The ten acceptance criteria at full size; one summary line per criterion."""

import pytest

from soergelcalc.acceptance import SuiteConfig, format_line, run_suite

from conftest import ACCEPTANCE_LINES


@pytest.fixture(scope="module")
def suite(engine):
    results = {r["id"]: r for r in run_suite(engine, SuiteConfig())}
    for cid in sorted(results):
        line = format_line(results[cid])
        ACCEPTANCE_LINES.append(line)
        print(line)
    return results


@pytest.mark.parametrize("cid", range(1, 11))
def test_criterion(suite, cid):
    res = suite[cid]
    assert res["runs"] > 0
    assert res["pass"], res["failed"]


def test_default_config_covers_required_presets():
    cfg = SuiteConfig()
    assert set(cfg.rational) >= {"A1", "A2", "A3", "B2", "G2"}
    assert all(p in cfg.inversion for p in ("A1", "A2", "A3", "B2", "G2"))
    assert cfg.determinism
