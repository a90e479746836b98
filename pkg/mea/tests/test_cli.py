import json

from mea_harness.cli import main


def test_run_writes_results(tmp_path, capsys):
    out = tmp_path / "results.json"
    code = main([
        "run", "--victim-id", "16", "--surrogate-id", "16",
        "--budget", "64", "--seed", "0", "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["victim_id"] == 16
    assert doc["surrogate_id"] == 16
    assert set(doc["test1"]) == {"mode", "victim_acc", "surrogate_acc", "relative"}


def test_surrogate_id_from_analysis_report(tmp_path):
    # Consumes the cache-analysis report format: estimates.id_rounded picks
    # the surrogate side (snapped to the nearest toy size).
    report = {
        "config": {"p": 320, "q": 320, "unroll": 4},
        "loops": {"L1": {"N": 1, "ST": 582, "AT": 5212}},
        "estimates": {"m": 289.0, "n": 72, "k": 27.0, "kernel": 3.0,
                      "id_raw": 17.2, "id_rounded": 17},
        "warnings": [],
    }
    report_path = tmp_path / "report.json"
    report_path.write_text(json.dumps(report))
    out = tmp_path / "results.json"
    code = main([
        "run", "--victim-id", "16", "--from-report", str(report_path),
        "--budget", "64", "--seed", "0", "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["surrogate_id"] == 16  # 17 snaps to the nearest toy side
