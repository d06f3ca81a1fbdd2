"""Python access to the procassess metric core."""

from ._core import (
    InputError,
    InvalidArgument,
    NetworkError,
    ParseError,
    TimeInterval,
    coverage_fraction,
    greedy_match,
    hit_ratio,
    iou,
    normalize,
    parse_missing_verdict,
    parse_order_verdict,
    parse_segment_list,
    parse_time,
    prf_at_thresholds,
    render_report,
    rouge_l,
    seconds_to_frames,
    token_f1,
    top1_accuracy,
)

__all__ = [
    "InputError",
    "InvalidArgument",
    "NetworkError",
    "ParseError",
    "TimeInterval",
    "coverage_fraction",
    "greedy_match",
    "hit_ratio",
    "iou",
    "normalize",
    "parse_missing_verdict",
    "parse_order_verdict",
    "parse_segment_list",
    "parse_time",
    "prf_at_thresholds",
    "render_report",
    "rouge_l",
    "seconds_to_frames",
    "token_f1",
    "top1_accuracy",
]
