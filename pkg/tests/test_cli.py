import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from squeezelab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_squeeze_annulus(capsys):
    code, out, _ = run(capsys, "squeeze", "--domain", "annulus:0.25", "--z", "0.3")
    assert code == 0
    doc = json.loads(out)
    assert doc["format_version"] == cli.FORMAT_VERSION
    assert doc["result"]["kind"] == "exact"
    assert doc["result"]["value"] == pytest.approx(0.8333333333333334)


def test_modulus_annulus(capsys):
    code, out, _ = run(capsys, "modulus", "--domain", "annulus:0.2", "--resolution", "256")
    m = json.loads(out)["result"]["modulus"]
    assert code == 0
    assert abs(m["value"] - 0.256152) <= max(m["error_estimate"], 1e-4)


def test_verify_rw_passes(capsys):
    code, out, _ = run(capsys, "verify", "rw", "--q", "0.1", "--a", "0.4")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["passed"]
    assert doc["info"]["inner_deviation"] < 1e-8


def test_verify_failure_prints_inequality(capsys):
    code, _, err = run(capsys, "verify", "rw", "--q", "0.9", "--a", "0.95")
    assert code == 2
    assert "FAIL" in err and "<" in err and "e-" in err


def test_malformed_json_reports_position(capsys):
    code, _, err = run(capsys, "squeeze", "--domain", '{"type": "annulus",\n  "inner_radius": 0.2,}', "--z", "0.5")
    assert code == 1
    assert "line 2" in err and "column" in err


def test_usage_errors(capsys):
    assert run(capsys, "modulus", "--domain", "annulus:0.2", "--resolution", "16")[0] == 1
    assert run(capsys, "squeeze", "--domain", "annulus:0.25", "--z", "0.1")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_sweep_csv(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--domain", "annulus:0.25", "--radii", "0.3,0.5,0.7", "-o", str(out))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == list(cli.SWEEP_COLUMNS)
    assert [r[4] for r in rows[1:]] == ["inner", "inner+outer", "outer"]
    assert float(rows[1][2]) == pytest.approx(0.25 / 0.3)


def test_plot_is_valid_svg(capsys, tmp_path):
    out = tmp_path / "fig.svg"
    code, _, _ = run(capsys, "plot", "--domain", "slit_disk:3,0.5,0.3", "--z", "0", "-o", str(out))
    assert code == 0
    root = ET.parse(out).getroot()
    assert root.tag.endswith("svg")
    texts = [t.text for t in root.iter() if t.tag.endswith("text")]
    assert texts == [label for label, _ in cli.render_svg.__globals__["LEGEND"]]


def test_cache_hit_is_byte_identical(capsys, tmp_path):
    cache = tmp_path / "cache"
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["modulus", "--domain", "annulus:0.3", "--resolution", "64", "--cache-dir", str(cache)]
    c1, _, e1 = run(capsys, *args, "-o", str(a))
    c2, _, e2 = run(capsys, *args, "-o", str(b))
    assert c1 == c2 == 0
    assert "cache hit" not in e1 and "cache hit" in e2
    assert a.read_bytes() == b.read_bytes()
    _, _, e3 = run(capsys, *args, "--no-cache", "-o", str(b))
    assert "cache hit" not in e3 and a.read_bytes() == b.read_bytes()


def test_cache_corruption_recomputes(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = ["squeeze", "--domain", "annulus:0.25", "--z", "0.4", "--cache-dir", str(cache)]
    _, first, _ = run(capsys, *args)
    (entry,) = list(cache.glob("*.json"))
    entry.write_text(entry.read_text().replace("0.625", "0.999"))
    code, again, err = run(capsys, *args)
    assert code == 0 and "corrupt" in err and again == first


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    run(capsys, "slit-map", "--q", "0.1", "--a", "0.4")
    assert len(list(tmp_path.glob("*.json"))) == 1


def test_cache_key_sensitivity():
    base = cli.cache_key("modulus", '{"type":"annulus"}', 256, 0, "0.1.0")
    assert base == cli.cache_key("modulus", '{"type":"annulus"}', 256, 0, "0.1.0")
    assert base != cli.cache_key("modulus", '{"type":"annulus"}', 512, 0, "0.1.0")
    assert base != cli.cache_key("modulus", '{"type":"annulus"}', 256, 0, "0.2.0")
    assert base != cli.cache_key("modulus", '{"type":"annulus"}', 256, 1, "0.1.0")


def test_json_output_is_deterministic(capsys):
    _, a, _ = run(capsys, "slit-map", "--q", "0.2", "--a", "0.5", "--z", "0.7+0.1j")
    _, b, _ = run(capsys, "slit-map", "--q", "0.2", "--a", "0.5", "--z", "0.7+0.1j")
    assert a == b


def test_domain_spec_file(capsys, tmp_path):
    spec = tmp_path / "ring.json"
    spec.write_text(json.dumps({"type": "annulus", "inner_radius": 0.25, "moebius": {"a": [0.2, 0.1]}}))
    code, out, _ = run(capsys, "squeeze", "--domain", str(spec), "--z", "0.2")
    assert code == 0
    assert json.loads(out)["result"]["kind"] == "exact"


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "slit-map", "--q", "0.1", "--a", "0.4", "-o", str(tmp_path / "missing" / "x.json"))
    assert code == 1 and "writable" in err


@pytest.mark.parametrize("argv", [["thm1", "--resolution", "256"], ["lemma2", "--resolution", "128"],
                                  ["polarization", "--trials", "10"], ["special"]])
def test_verify_fast_suites_pass(capsys, argv):
    code, out, _ = run(capsys, "verify", *argv)
    assert code == 0, out
    assert json.loads(out)["result"]["passed"]


def test_partition_command_and_curve_plot(capsys, tmp_path):
    spec = tmp_path / "barrier.json"
    spec.write_text(json.dumps({"type": "barrier_set", "arcs": [{"radius": 0.5, "center_angle": 0.0,
                                                                  "half_width": 1.0}],
                                "enclosing_radii": [0.5, 0.5]}))
    out = tmp_path / "part.json"
    code, _, _ = run(capsys, "partition", "--domain", str(spec), "--harmonics", "1", "--resolution", "64",
                     "--max-evals", "6", "-o", str(out))
    assert code == 0
    doc = json.loads(out.read_text())["result"]
    assert doc["objective"] == pytest.approx(doc["alpha1"] ** 2 * doc["m1"]["value"]
                                             + doc["alpha2"] ** 2 * doc["m2"]["value"])
    svg = tmp_path / "part.svg"
    assert run(capsys, "plot", "--domain", str(spec), "--curve", str(out), "-o", str(svg))[0] == 0
    ET.parse(svg)
