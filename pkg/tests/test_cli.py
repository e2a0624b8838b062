import json

import numpy as np
import pytest

from cmacr import cli
from cmacr.cmacr_regions import GaussianScenario, symmetric_upper_bound
from cmacr.tables import read_csv, read_numeric_csv, render_csv


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


FIG5 = {"type": "gaussian", "P1_db": 5, "P2_db": 5, "P3_db": 5, "gamma2": 5, "eta2": 10}


def test_region_binary(tmp_path):
    sc = write(tmp_path, "b.json", {"type": "binary", "eps1": 0, "eps2": 0, "eps3": 0})
    out = tmp_path / "b.csv"
    assert cli.main(["region", "binary", "--scenario", sc, "--out", str(out)]) == 0
    head, rows = read_csv(out)
    assert head == ["constraint", "bound"]
    assert [float(r[1]) for r in rows] == [1.0, 1.0, 1.0]


def test_region_binary_df_has_extra_row(tmp_path):
    sc = write(tmp_path, "b.json", {"type": "binary", "eps1": 0.05, "eps2": 0.05, "eps3": 0.2})
    out = tmp_path / "b.csv"
    assert cli.main(["region", "binary-df", "--scenario", sc, "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 4 and float(rows[3][1]) == pytest.approx(0.2781, abs=1e-4)


def test_region_df_frontier(tmp_path):
    out = tmp_path / "df.csv"
    assert cli.main(["region", "df", "--scenario", write(tmp_path, "g.json", FIG5), "--out", str(out)]) == 0
    head, data = read_numeric_csv(out)
    assert head == ["r1", "r2"] and data.shape == (201, 2)
    assert np.all(np.diff(data[:, 1]) <= 1e-12)
    text = out.read_text()
    assert text.startswith("# cmacr") and "# source: decode-and-forward" in text


@pytest.mark.parametrize("kind", ["cognitive-full", "cognitive-partial", "cognitive-links"])
def test_region_cognitive(tmp_path, kind):
    doc = {"type": "cognitive", "P1_db": 3, "P2_db": 3, "P3_db": 3, "c1": 0.3, "c2": "inf", "points": 21}
    out = tmp_path / "c.csv"
    assert cli.main(["region", kind, "--scenario", write(tmp_path, "c.json", doc), "--out", str(out)]) == 0
    _, data = read_numeric_csv(out)
    assert data.shape == (21, 2)


def test_region_orthogonal(tmp_path):
    sc = write(tmp_path, "o.json", {"type": "orthogonal", "c1": 1, "c2": 1, "c3": 1})
    out = tmp_path / "o.csv"
    assert cli.main(["region", "orthogonal", "--scenario", sc, "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert [float(r[1]) for r in rows] == [1.0, 2.0, 2.0, 3.0]


def test_region_errors(tmp_path):
    b = write(tmp_path, "b.json", {"type": "binary", "eps1": 0, "eps2": 0, "eps3": 0})
    out = str(tmp_path / "x.csv")
    assert cli.main(["region", "outer", "--scenario", b, "--out", out]) == 2
    bad = write(tmp_path, "bad.json", {**FIG5, "extra": 1})
    assert cli.main(["region", "df", "--scenario", bad, "--out", out]) == 2
    bad = write(tmp_path, "bad2.json", {"type": "binary", "eps1": 0.7, "eps2": 0, "eps3": 0})
    assert cli.main(["region", "binary", "--scenario", bad, "--out", out]) == 2
    assert cli.main(["region", "df", "--scenario", str(tmp_path / "missing.json"), "--out", out]) == 2
    empty = write(tmp_path, "e.json", {"type": "cognitive", "P1_db": 3, "P2_db": 3, "P3_db": 3, "r3": 5})
    assert cli.main(["region", "cognitive-full", "--scenario", empty, "--out", out]) == 3
    nolinks = write(tmp_path, "n.json", {"type": "cognitive", "P1_db": 3, "P2_db": 3, "P3_db": 3})
    assert cli.main(["region", "cognitive-links", "--scenario", nolinks, "--out", out]) == 2


def test_rate_examples(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["rate", "--scheme", "lattice", "--p-db", "0", "--gamma2", "0.1", "--eta2", "10",
                     "--out", str(out)]) == 0
    _, data = read_numeric_csv(out)
    assert data[0, 2] == 0.0
    assert cli.main(["rate", "--scheme", "upper", "--p-db", "10", "--gamma2", "0.1", "--eta2", "10",
                     "--out", str(out)]) == 0
    _, data = read_numeric_csv(out)
    assert data[0, 2] == symmetric_upper_bound(GaussianScenario.symmetric(10.0, 0.1, 10.0))
    assert cli.main(["rate", "--scheme", "lattice", "--p-db-range", "-10", "40", "1", "--gamma2", "0.1",
                     "--eta2", "10", "--out", str(out)]) == 0
    _, data = read_numeric_csv(out)
    assert data.shape == (51, 3)
    assert cli.main(["rate", "--scheme", "df", "--p-db-range", "5", "1", "1", "--gamma2", "0.1",
                     "--eta2", "10", "--out", str(out)]) == 2
    assert cli.main(["rate", "--scheme", "df", "--p-db-range", "0", "1", "0", "--gamma2", "0.1",
                     "--eta2", "10", "--out", str(out)]) == 2


def test_figure_unknown_id(tmp_path):
    assert cli.main(["figure", "7", "--out-dir", str(tmp_path)]) == 2


def test_figure_3_and_6(tmp_path):
    assert cli.main(["figure", "3", "--out-dir", str(tmp_path)]) == 0
    assert cli.main(["figure", "6", "--out-dir", str(tmp_path)]) == 0
    f3 = sorted(p.name for p in tmp_path.glob("fig3_*.csv"))
    assert {"fig3_full_P3_m6dB.csv", "fig3_full_P3_3dB.csv",
            "fig3_partial_P3_m6dB.csv", "fig3_partial_P3_3dB.csv"} <= set(f3)
    f6 = sorted(p.name for p in tmp_path.glob("fig6_*.csv"))
    assert f6 == ["fig6_cf.csv", "fig6_df.csv", "fig6_lattice.csv", "fig6_upper.csv"]
    for name in f6:
        _, data = read_numeric_csv(tmp_path / name)
        assert data.shape == (51, 3)


def test_sim_commands(tmp_path):
    doc = {"type": "sim", "eps1": 0, "eps2": 0, "eps3": 0, "n": 12, "k1": 4, "k2": 3, "trials": 20,
           "master_seed": 4, "relay_decoder": "both"}
    assert cli.main(["sim", "--config", write(tmp_path, "s.json", doc), "--out-dir", str(tmp_path / "o")]) == 0
    for mode in ("xor", "joint"):
        rep = json.loads((tmp_path / "o" / f"sim_{mode}.json").read_text())
        assert rep["relay_error_rate"] == rep["end_to_end_error_rate"] == 0
        assert (tmp_path / "o" / f"sim_{mode}.csv").exists()
    capped = {**doc, "n": 40, "k1": 20, "k2": 2}
    assert cli.main(["sim", "--config", write(tmp_path, "c.json", capped), "--out-dir", str(tmp_path)]) == 4
    bad = {**doc, "k2": 9}
    assert cli.main(["sim", "--config", write(tmp_path, "b.json", bad), "--out-dir", str(tmp_path)]) == 2
    assert cli.main(["sim", "--config", write(tmp_path, "g.json", FIG5), "--out-dir", str(tmp_path)]) == 2


def test_selftest(capsys):
    assert cli.main(["selftest", "-v"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == len(cli.SELFTESTS) and " s]" in out
    assert cli.main(["selftest", "--inject-fault", "hb"]) == 1
    assert "FAIL" in capsys.readouterr().out
    # the hook must not leak into later calls
    assert cli.main(["selftest"]) == 0


def test_csv_dialect():
    text = render_csv(["a", "b"], [(0.1, 2), (1e-20, 3)], "test", {"k": {"x": float("inf")}})
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0].startswith("#") and lines[2] == '# k: {"x": "inf"}'
    assert lines[3:] == ["a,b", "0.1,2", "1e-20,3"]
    with pytest.raises(ValueError):
        render_csv(["a"], [(1, 2)], "x")
