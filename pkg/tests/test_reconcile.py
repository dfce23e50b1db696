import json
import math

import pytest

from su11bounds.reconcile import classify, reconcile_report, worst


@pytest.fixture(scope="module")
def report():
    return reconcile_report()


def test_classify_thresholds():
    assert classify(0.0) == "match"
    assert classify(5e-7) == "match"
    assert classify(1e-3) == "partial"
    assert classify(0.5) == "mismatch"
    assert classify(None) == "mismatch"
    assert worst(["match", "partial"]) == "partial"


def test_report_schema(report):
    assert report["schema"] == "su11bounds.reconcile/1"
    assert report["thresholds"]["match"] == 1e-6 and report["thresholds"]["partial"] == 1e-2
    for b in report["bound_branches"] + report["measurement_branches"]:
        assert b["status"] in ("match", "partial", "mismatch")
        assert isinstance(b["best"], bool)
    assert sum(b["best"] for b in report["bound_branches"]) == 1


def test_literal_branch(report):
    lit = next(b for b in report["bound_branches"] if b["id"] == "paper-literal")
    by_g = {p["g"]: p for p in lit["points"]}
    for g in (0.25, 0.5, 1.0):
        p = by_g[g]
        assert len(p["qfim"]) == 4
        assert p["cs_engine"] == pytest.approx(4 * math.cosh(2 * g), rel=1e-12)
        assert p["ch_engine"] == pytest.approx(4 * math.cosh(2 * g) + 4, rel=1e-12)
        assert p["cs_deviation"] == pytest.approx(abs(p["cs_engine"] - p["cs_paper"]) / p["cs_paper"])
        assert p["ch_deviation"] == pytest.approx(abs(p["ch_engine"] - p["ch_paper"]) / p["ch_paper"])
        assert p["cs_status"] == "mismatch" and p["ch_status"] == "mismatch"
        assert p["qfim_offdiag_norm"] > 0
    assert by_g[0.0]["status"] == "match"


def test_half_gain_branches_match_at_g0(report):
    for b in report["bound_branches"]:
        if b["kind"] == "paper_gram" or b["knobs"]["kappa"] == 0.5:
            assert b["matches_at_g0"], b["id"]
        else:
            assert not b["matches_at_g0"], b["id"]


def test_engine_values_untouched(report):
    for b in report["bound_branches"]:
        for p in b["points"]:
            if p["g"] > 0:
                assert p["ch_engine"] != p["ch_paper"]


def test_report_deterministic(report):
    assert json.dumps(reconcile_report()) == json.dumps(report)


def test_diagonal_only_diagnostics(report):
    s = report["summary"]
    assert "paper-literal" in s["diagonal_only_cs_matches"]
    assert "homodyne-squeezed(theta_g=1.5708,kappa=0.5)" in s["diagonal_only_cf_matches"]
    lit = next(b for b in report["bound_branches"] if b["id"] == "paper-literal")
    for p in lit["points"]:
        assert p["cs_diagonal_only"] == pytest.approx(4 / math.cosh(2 * p["g"]), rel=1e-12)
        if p["g"] > 0:
            assert p["cs_status"] == "mismatch"  # diagnostics never change the status
