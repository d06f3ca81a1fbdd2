import json
import os
import pathlib
import subprocess

import pytest

import procassess as pa

FIXTURES = pathlib.Path(os.environ.get("PROCASSESS_FIXTURES", pathlib.Path(__file__).parents[2] / "fixtures"))


def test_iou_and_coverage():
    assert pa.iou((0, 10), (5, 15)) == pytest.approx(1 / 3)
    assert pa.iou((0, 1), (2, 3)) == 0.0
    assert pa.coverage_fraction([(0, 10)], [(0, 3), (5, 7)]) == pytest.approx(0.5)


def test_bad_interval_raises_value_error():
    with pytest.raises(ValueError):
        pa.TimeInterval(5, 1)


def test_greedy_match_pairs_both_halves():
    pairs = pa.greedy_match([(0, 9), (11, 20)], [(0, 10), (10, 20)], 0.5)
    assert [(p, g) for p, g, _ in pairs] == [(0, 0), (1, 1)]
    assert all(i == pytest.approx(0.9) for _, _, i in pairs)


def test_prf_micro_average():
    rows = pa.prf_at_thresholds([([(0, 10)], [(0, 10), (20, 30)])], [0.5])
    assert rows[0]["tp"] == 1 and rows[0]["fn"] == 1
    assert rows[0]["f1"] == pytest.approx(2 / 3)


def test_hit_ratio_grows_with_tolerance():
    r = pa.hit_ratio([0.0, 10.7, 21.6], [0.2, 10.0, 20.0])
    assert r == sorted(r)
    assert r[-1] == pytest.approx(1.0)


def test_text_metrics():
    assert pa.normalize("Clean the SITE!") == ["clean", "the", "site"]
    assert pa.rouge_l("clean the site", "clean site") == pytest.approx(0.8)
    assert pa.token_f1("a b", "a b") == pytest.approx(1.0)


def test_response_parsing():
    parsed = pa.parse_segment_list("0.0 - 4.5: wash hands\nthis line has no times\n4.5 - 9: dry hands")
    assert len(parsed["segments"]) == 2 and parsed["malformed_lines"] == 1
    assert parsed["segments"][1]["caption"] == "dry hands"
    assert pa.parse_time("01:05") == pytest.approx(65.0)
    assert pa.parse_order_verdict("I cannot tell.", 4) is None
    assert pa.parse_missing_verdict('{"has_missing": false}')["has_missing"] is False


def test_adversarial_corpus_never_raises():
    cases = json.loads((FIXTURES / "responses" / "adversarial.json").read_text())["cases"]
    for c in cases:
        pa.parse_segment_list(c["text"])
        pa.parse_order_verdict(c["text"], 4)
        pa.parse_missing_verdict(c["text"])


@pytest.mark.skipif("PROCASSESS_CLI" not in os.environ, reason="command-line tool not available")
def test_render_structured_report(tmp_path):
    report = FIXTURES / "report"
    subprocess.run(
        [os.environ["PROCASSESS_CLI"], "--log-level", "error", "evaluate", "--task", "order_correction",
         "--manifest", str(report / "manifest.jsonl"), "--dump", str(report / "predictions_synthetic-fine.jsonl"),
         "--model", "synthetic-fine", "--format", "json", "--out", str(tmp_path)],
        check=True,
    )
    files = pa.render_report((tmp_path / "report.json").read_text(), "csv")
    assert files["order_error.csv"] == "Model,Hit@0.5s,Hit@1.0s,Hit@2.0s\r\nsynthetic-fine,0.3750,0.3750,0.3750\r\n"
    with pytest.raises(pa.ParseError):
        pa.render_report("{not json", "csv")
