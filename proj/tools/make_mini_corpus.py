"""Regenerates fixtures/mini: three short synthetic nursing-skill videos as
1 FPS frame directories plus their annotation file."""

import json
import pathlib
import sys

from PIL import Image, ImageDraw

VIDEOS = [
    {
        "video_id": "vid_hand_hygiene",
        "procedure_label": "hand hygiene",
        "duration": 12.0,
        "segments": [
            (0.0, 3.0, "wets hands under running water"),
            (3.0, 7.0, "applies soap and rubs palms together"),
            (8.0, 11.0, "rinses hands and dries with a paper towel"),
        ],
    },
    {
        "video_id": "vid_venipuncture",
        "procedure_label": "venipuncture",
        "duration": 14.0,
        "segments": [
            (0.0, 2.0, "applies the tourniquet above the elbow"),
            (2.0, 5.0, "cleans the site with alcohol"),
            (5.0, 9.0, "inserts the needle into the vein"),
            (9.0, 13.0, "releases the tourniquet and withdraws the needle"),
        ],
    },
    {
        "video_id": "vid_blood_pressure",
        "procedure_label": "blood pressure measurement",
        "duration": 10.0,
        "segments": [
            (1.0, 4.0, "wraps the cuff around the upper arm"),
            (4.0, 6.0, "places the stethoscope over the brachial artery"),
            (6.0, 9.0, "inflates and slowly deflates the cuff"),
        ],
    },
]

WIDTH, HEIGHT = 160, 96


def frame(video_idx: int, t: int) -> Image.Image:
    img = Image.new("RGB", (WIDTH, HEIGHT), (40 + 60 * video_idx, 90, 160 - 40 * video_idx))
    draw = ImageDraw.Draw(img)
    x = (t * 11) % (WIDTH - 16)
    draw.rectangle([x, 50, x + 15, 75], fill=(230, 200, 60))
    draw.line([0, HEIGHT - 1, t * 11, HEIGHT - 1], fill=(255, 255, 255))
    return img


def main(root: pathlib.Path) -> None:
    frames_root = root / "frames"
    doc = {"schema": "procassess.annotations", "schema_version": 1, "videos": []}
    for vi, v in enumerate(VIDEOS):
        out = frames_root / v["video_id"]
        out.mkdir(parents=True, exist_ok=True)
        for t in range(int(v["duration"])):
            frame(vi, t).save(out / f"frame_{t:06d}.png", optimize=True)
        doc["videos"].append({
            "video_id": v["video_id"],
            "procedure_label": v["procedure_label"],
            "duration": v["duration"],
            "segments": [{"start": s, "end": e, "caption": c} for s, e, c in v["segments"]],
        })
    (root / "annotations.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main(pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "mini")
