import json
import re

import pytest

from hermlat import verify as V


def test_report_shape():
    report = V.verify("geom3", V.VerifyParams(p=3, seed=2))
    assert report["suite"] == "geom3"
    assert set(report["summary"]) == {"total", "passed", "seed", "runtime_ms"}
    for case in report["cases"]:
        assert set(case) == {"id", "inputs", "expected", "actual", "pass"}
        assert re.fullmatch(r"[0-9a-f]{16}", case["inputs"])
        assert case["pass"] == (case["expected"] == case["actual"])
    assert report["summary"]["passed"] == report["summary"]["total"] == 3


def test_reports_are_deterministic():
    P = V.VerifyParams(p=3, max_val=4, seed=9, count=4)
    a = V.verify("special", P, timing=False)
    b = V.verify("special", P, jobs=2, timing=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_crash_becomes_failed_case(monkeypatch):
    def boom(spec):
        raise RuntimeError("kaput")

    monkeypatch.setitem(V.RUNNERS, "isom", boom)
    case = V.run_case(("isom", "symp", 1, 1, 1, 3))
    assert case["pass"] is False and "kaput" in case["actual"]


def test_unknown_suite():
    with pytest.raises(ValueError):
        V.verify("nope", V.VerifyParams())


@pytest.mark.parametrize("suite", ["glcount", "isom", "coset", "geom3"])
def test_fixed_suites_pass(suite):
    s = V.verify(suite, V.VerifyParams(p=3, max_val=3))["summary"]
    assert s["passed"] == s["total"] > 0
