import json
import math

import pytest

from su11bounds.cli import EXIT_IO, EXIT_MODEL, EXIT_OK, EXIT_USAGE, main


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# su11bounds.")
    header = lines[1].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[2:]]


def test_sweep_csv(tmp_path):
    code, text = run(tmp_path, "sweep", "--g-min", "0", "--g-max", "2", "--steps", "41")
    assert code == EXIT_OK
    rows = parse_csv(text)
    assert len(rows) == 41
    assert list(rows[0]) == ["g", "cs_engine", "ch_engine", "ch_status", "cs_paper", "ch_paper",
                             "cf_paper", "tr_finv_engine", "tr_mse_mc"]
    assert float(rows[0]["cs_paper"]) == 4.0 and float(rows[0]["ch_paper"]) == 8.0
    r1 = rows[20]
    assert float(r1["g"]) == 1.0
    assert float(r1["ch_paper"]) == 8 * math.exp(-2) == float(r1["cf_paper"])
    assert rows[0]["tr_mse_mc"] == ""


def test_sweep_byte_stable(tmp_path):
    args = ["sweep", "--steps", "5", "--gram", "gaussian", "--workers", "3"]
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args[:-2], name="b")
    assert a == b


def test_sweep_json_and_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"steps": 3, "g-max": 1.0, "format": "json"}))
    code, text = run(tmp_path, "sweep", "--config", str(cfg), "--steps", "2")
    assert code == EXIT_OK
    data = json.loads(text)
    assert [r["g"] for r in data["rows"]] == [0.0, 1.0]  # flag wins over config


def test_sweep_errors(tmp_path):
    assert main(["sweep", "--steps", "0"]) == EXIT_USAGE
    assert main(["sweep", "--g-min", "2", "--g-max", "1"]) == EXIT_USAGE
    assert main(["sweep", "--kappa", "0.3"]) == EXIT_USAGE
    assert main(["sweep", "--out", str(tmp_path / "missing" / "x.csv")]) == EXIT_IO
    assert main(["sweep", "--config", str(tmp_path / "nope.json")]) == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["sweep", "--config", str(bad)]) == EXIT_USAGE
    bad.write_text('{"colour": 1}')
    assert main(["sweep", "--config", str(bad)]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE


def test_reconcile_command(tmp_path):
    code, text = run(tmp_path, "reconcile", "--g-values", "0,0.5")
    assert code == EXIT_OK
    data = json.loads(text)
    assert data["g_values"] == [0.0, 0.5]
    _, again = run(tmp_path, "reconcile", "--g-values", "0,0.5", name="again")
    assert again == text


def test_mc_command(tmp_path):
    code, text = run(tmp_path, "mc", "--shots", "100000", "--seed", "5")
    assert code == EXIT_OK
    data = json.loads(text)
    est = data["estimation"]
    assert abs(est["tr_mse"] - 8.0) < 5 * est["tr_mse_se"]
    assert data["bounds"]["tr_mse_mc"] == est["tr_mse"]
    _, again = run(tmp_path, "mc", "--shots", "100000", "--seed", "5", name="again")
    assert again == text


def test_mc_se_scaling(tmp_path):
    _, small = run(tmp_path, "mc", "--shots", "1000", "--seed", "1", name="s")
    _, large = run(tmp_path, "mc", "--shots", "100000", "--seed", "1", name="l")
    ratio = json.loads(small)["estimation"]["tr_mse_se"] / json.loads(large)["estimation"]["tr_mse_se"]
    assert 10 / 1.5 <= ratio <= 10 * 1.5


def test_mc_errors(tmp_path):
    assert main(["mc", "--shots", "10"]) == EXIT_USAGE
    assert main(["mc", "--scheme", "homodyne-squeezed"]) == EXIT_MODEL
    assert main(["mc", "--scheme", "homodyne-alternating"]) == EXIT_MODEL
    assert main(["mc", "--theta", "1,2"]) == EXIT_USAGE


def test_mc_save_outcomes(tmp_path):
    raw = tmp_path / "raw.bin"
    code, _ = run(tmp_path, "mc", "--shots", "1000", "--save-outcomes", str(raw))
    assert code == EXIT_OK
    assert raw.stat().st_size == 1000 * 4 * 8
    assert (tmp_path / "raw.bin.json").exists()


def test_phasespace(tmp_path):
    code, text = run(tmp_path, "phasespace", "--g", "0", "--alpha", "0")
    assert code == EXIT_OK
    rows = parse_csv(text)
    assert len(rows) >= 6
    assert list(rows[0]) == ["stage", "mode", "center_q", "center_p", "semi_major", "semi_minor", "angle"]
    for r in rows:
        assert float(r["semi_major"]) == pytest.approx(0.5) and float(r["semi_minor"]) == pytest.approx(0.5)


def test_phasespace_thermal_and_shift(tmp_path):
    g = 0.5
    _, text = run(tmp_path, "phasespace", "--g", str(g), "--theta", "0.2,0.4,-0.6,0.8")
    rows = parse_csv(text)
    nbs = [r for r in rows if r["stage"] == "nbs"]
    enc = [r for r in rows if r["stage"] == "encoded"]
    for r in nbs:
        assert float(r["semi_major"]) == pytest.approx(math.sqrt(math.cosh(2 * g)) / 2, abs=1e-12)
    shifts = [(0.1, 0.2), (-0.3, 0.4)]
    for a, b, (dq, dp) in zip(nbs, enc, shifts):
        assert float(b["center_q"]) - float(a["center_q"]) == pytest.approx(dq, abs=1e-12)
        assert float(b["center_p"]) - float(a["center_p"]) == pytest.approx(dp, abs=1e-12)
        assert b["semi_major"] == a["semi_major"]


def test_stdout(capsys):
    assert main(["phasespace", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data["rows"]) == 8
