"""Writes fixtures/report/predictions_<model>.jsonl: two synthetic models whose
answers deviate from the mini corpus ground truth in fixed, hand-picked ways.
The manifest next to them comes from `procassess perturb --seed 2024`."""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"


def record(task, item, text):
    return {
        "schema": "procassess.dump",
        "schema_version": 1,
        "request_id": f"{task}/{item}",
        "task": task,
        "video_id": item,
        "status": "ok",
        "text": text,
        "error": "",
        "attempts": 1,
        "http_status": 200,
    }


def fine(videos, samples):
    out = []
    for i, v in enumerate(videos):
        label = v["procedure_label"] if i < 2 else "blood draw"
        segs = [
            {"start": s["start"] + 0.4, "end": s["end"] + 0.4, "caption": " ".join(s["caption"].split()[1:])}
            for s in v["segments"]
        ]
        segs[-1]["end"] = min(segs[-1]["end"], v["duration"])
        out.append(record("procedure_id", v["video_id"], json.dumps({"procedure": label, "segments": segs})))
        out.append(record("dense_caption", v["video_id"], json.dumps({"segments": segs})))
    keeps = 0
    for s in samples:
        sid, kind, gt = s["sample_id"], s["kind"], s["ground_truth"]
        if kind == "mask":
            a, b = gt["masked_interval"]
            out.append(record("missing_event", sid, json.dumps(
                {"has_missing": True, "start": a + 0.3, "end": b + 0.3, "caption": gt["hidden_caption"]})))
        if kind == "keep":
            keeps += 1
            out.append(record("missing_event", sid, json.dumps({"has_missing": keeps == 1, "caption": "x"})))
        if kind == "swap":
            out.append(record("order_correction", sid, json.dumps(
                {"is_correct": False, "misplaced": gt["misplaced_indices"], "corrected_order": gt["correct_order"]})))
        if kind in ("shift", "keep"):
            out.append(record("order_correction", sid, "The sequence is correct."))
    return out


def coarse(videos, samples):
    out = []
    for i, v in enumerate(videos):
        segs = v["segments"]
        if i == 2:
            text = "The nurse measures blood pressure."
        else:
            lines = []
            for k in range(0, len(segs), 2):
                group = segs[k:k + 2]
                lines.append(f"{group[0]['start']:g} - {group[-1]['end']:g}: {group[0]['caption']}")
            text = "Procedure: hand hygiene\n" + "\n".join(lines)
        out.append(record("procedure_id", v["video_id"], text))
        out.append(record("dense_caption", v["video_id"], text))
    for s in samples:
        sid, kind, gt = s["sample_id"], s["kind"], s["ground_truth"]
        if kind == "mask":
            a, b = gt["masked_interval"]
            out.append(record("missing_event", sid, f"A step is missing: {a + 0.8:g} - {b:g}: {gt['hidden_caption']}"))
        if kind == "keep":
            out.append(record("missing_event", sid, "Missing step: dries hands"))
        if kind != "mask":
            out.append(record("order_correction", sid, "The order is incorrect. Misplaced: 0"))
    return out


def main():
    videos = json.loads((FIX / "mini" / "annotations.json").read_text())["videos"]
    lines = (FIX / "report" / "manifest.jsonl").read_text().splitlines()
    samples = [json.loads(l) for l in lines[1:] if l.strip()]
    for name, build in (("synthetic-fine", fine), ("synthetic-coarse", coarse)):
        path = FIX / "report" / f"predictions_{name}.jsonl"
        path.write_text("".join(json.dumps(r, separators=(",", ":")) + "\n" for r in build(videos, samples)))


if __name__ == "__main__":
    main()
