"""End-to-end CLI runs in a scratch data directory."""

import json

import pytest

from conftest import HOUR, T0, make_attribute
from ioc_decay.cli import main, parse_duration, parse_timestamp
from ioc_decay.profiles import ProfileStore

EXAMPLE1_DELTA = 1.8073549220576042


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def workspace(tmp_path):
    data_dir = tmp_path / "data"
    attrs = tmp_path / "attributes.jsonl"
    sights = tmp_path / "sightings.jsonl"
    # Full weight on source confidence at 0.8 realizes the documented base of 80.
    attribute = make_attribute(
        "example-1", attr_type="ip-dst", first_seen=T0, source_confidence=0.8
    )
    attrs.write_text(json.dumps(attribute.to_json_dict()) + "\n", encoding="utf-8")
    sights.write_text(
        json.dumps(
            {"attribute_id": "example-1", "timestamp": T0, "kind": "seen", "source": "ids"}
        )
        + "\n",
        encoding="utf-8",
    )
    ProfileStore(data_dir / "profiles").save(
        __import__("ioc_decay").DecayProfile(
            attr_type="ip-dst", model="polynomial", tau_hours=168.0, delta=EXAMPLE1_DELTA,
            weight_tg=0.0, omega_sc=100.0, threshold=0.0,
        )
    )
    return {"data_dir": str(data_dir), "attrs": str(attrs), "sights": str(sights)}


def test_parse_timestamp_accepts_both_forms():
    assert parse_timestamp("1600000000") == 1_600_000_000
    assert parse_timestamp("2020-09-13T12:26:40Z") == 1_600_000_000
    assert parse_timestamp("2020-09-13T12:26:40+00:00") == 1_600_000_000


def test_parse_duration_units():
    assert parse_duration("1d") == 86_400
    assert parse_duration("6h") == 21_600
    assert parse_duration("30m") == 1800
    assert parse_duration("90") == 90


def test_ingest_then_score_example1(capsys, workspace):
    code, out, _ = run_cli(
        capsys, "ingest", "--attributes", workspace["attrs"], "--sightings",
        workspace["sights"], "--data-dir", workspace["data_dir"],
    )
    assert code == 0
    report = json.loads(out)
    assert report["attributes"]["accepted"] == 1
    assert report["sightings"]["accepted"] == 1

    code, out, _ = run_cli(
        capsys, "score", "--attribute", "example-1", "--at", str(T0 + 48 * HOUR),
        "--data-dir", workspace["data_dir"],
    )
    assert code == 0
    evaluation = json.loads(out)
    assert evaluation["base_score"] == pytest.approx(80.0)
    assert evaluation["score"] == pytest.approx(40.0, abs=0.1)

    # t = 0: back at base; t = tau: zero and expired.
    _, out, _ = run_cli(
        capsys, "score", "--attribute", "example-1", "--at", str(T0),
        "--data-dir", workspace["data_dir"],
    )
    at_zero = json.loads(out)
    assert at_zero["score"] == pytest.approx(80.0)
    _, out, _ = run_cli(
        capsys, "score", "--attribute", "example-1", "--at", str(T0 + 168 * HOUR),
        "--data-dir", workspace["data_dir"],
    )
    at_tau = json.loads(out)
    assert at_tau["score"] == 0.0
    assert at_tau["expired"] is True


def test_ingest_with_org_confidence_map(capsys, tmp_path, workspace):
    mapping = tmp_path / "orgs.json"
    mapping.write_text(json.dumps({"org-a": 0.25}), encoding="utf-8")
    code, out, _ = run_cli(
        capsys, "ingest", "--attributes", workspace["attrs"], "--sightings",
        workspace["sights"], "--org-confidence", str(mapping),
        "--data-dir", workspace["data_dir"],
    )
    assert code == 0
    # Full weight on source confidence: score at t=0 reflects the mapped 0.25.
    code, out, _ = run_cli(
        capsys, "score", "--attribute", "example-1", "--at", str(T0),
        "--data-dir", workspace["data_dir"],
    )
    assert code == 0
    assert json.loads(out)["base_score"] == pytest.approx(25.0)


def test_score_unknown_attribute_errors(capsys, workspace):
    code, _, err = run_cli(
        capsys, "score", "--attribute", "ghost", "--data-dir", workspace["data_dir"]
    )
    assert code == 1
    error = json.loads(err)
    assert error["error"]["code"] == "unknown_attribute"
    assert "\n" not in err.strip()


def test_gen_synthetic_ingest_estimate_simulate_aggregate(capsys, tmp_path):
    out_dir = tmp_path / "synth"
    data_dir = tmp_path / "data"
    code, out, _ = run_cli(
        capsys, "gen-synthetic", "--seed", "7", "--attributes", "300",
        "--out-dir", str(out_dir),
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["attributes"] == 300

    code, out, _ = run_cli(
        capsys, "ingest", "--attributes", summary["attributes_file"],
        "--sightings", summary["sightings_file"], "--data-dir", str(data_dir),
    )
    assert code == 0

    code, out, _ = run_cli(
        capsys, "estimate", "--attr-type", "url", "--data-dir", str(data_dir),
        "--out-dir", str(tmp_path / "est"),
    )
    assert code == 0
    fit = json.loads(out)
    assert 0 < fit["half_quantile_hours"] < fit["tau_hours"]
    assert fit["paper_convention_delta"] == pytest.approx(1 / fit["delta"])
    hist = (tmp_path / "est" / "endtime_histogram.csv").read_text(encoding="utf-8")
    assert hist.splitlines()[0] == "hours,count"
    cdf = (tmp_path / "est" / "endtime_cdf.csv").read_text(encoding="utf-8")
    assert cdf.splitlines()[0] == "hours,fraction"

    # Store a fitted profile, then simulate over the synthetic window.
    ProfileStore(data_dir / "profiles").save(
        __import__("ioc_decay").DecayProfile(
            attr_type="url", model="polynomial", tau_hours=fit["tau_hours"],
            delta=fit["delta"], weight_tg=50.0, omega_sc=50.0, threshold=0.0,
        )
    )
    start = 1_500_000_000
    end = start + 90 * 24 * HOUR
    series_out = tmp_path / "series.csv"
    code, out, _ = run_cli(
        capsys, "simulate", "--from", str(start), "--to", str(end), "--profile", "url",
        "--tick-hours", "6", "--data-dir", str(data_dir),
        "--series-out", str(series_out),
    )
    assert code == 0
    sim = json.loads(out)
    assert sim["correct_removals"] + sim["premature_removals"] > 0
    assert series_out.exists()

    code, out, _ = run_cli(
        capsys, "aggregate", "--from", str(start), "--to", str(start + 5 * 86_400),
        "--bucket", "1d", "--data-dir", str(data_dir),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "bucket_start_iso8601,seen_count,false_positive_count,expiration_count"
    assert len(lines) == 6


def test_curve_csv(capsys, tmp_path):
    out_csv = tmp_path / "curve.csv"
    code, out, _ = run_cli(
        capsys, "curve", "--base", "80", "--tau", "168", "--delta", str(EXAMPLE1_DELTA),
        "--model", "polynomial", "--points", "5", "--out", str(out_csv),
        "--data-dir", str(tmp_path / "d"),
    )
    assert code == 0
    lines = out_csv.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "t_hours,score"
    assert lines[1] == "0.0,80.0"
    assert lines[-1].startswith("168.0,0")


def test_config_file_supplies_defaults(capsys, tmp_path):
    out_csv = tmp_path / "c.csv"
    config = tmp_path / "ioc.conf"
    config.write_text(
        f'base = 80\ntau = 100\ndelta = 1.0\nmodel = "linear"\npoints = 3\n'
        f'out = "{out_csv}"\n',
        encoding="utf-8",
    )
    code, _, _ = run_cli(capsys, "--config", str(config), "curve")
    assert code == 0
    lines = out_csv.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 4


def test_determinism_same_seed_same_files(capsys, tmp_path):
    for sub in ("one", "two"):
        code, _, _ = run_cli(
            capsys, "gen-synthetic", "--seed", "3", "--attributes", "50",
            "--out-dir", str(tmp_path / sub),
        )
        assert code == 0
    a = (tmp_path / "one" / "sightings.jsonl").read_bytes()
    b = (tmp_path / "two" / "sightings.jsonl").read_bytes()
    assert a == b
