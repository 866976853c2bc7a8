"""Pixelwise confusion counts and the five ISIC segmentation metrics."""

from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Union

import numpy as np

from slpnet.core.errors import NonBinaryTargetError, ShapeMismatchError
from slpnet.schemas.metrics import (
    METRIC_NAMES,
    AggregateReport,
    ConfusionCounts,
    MetricReport,
    RunSummary,
)
from slpnet.tensor.tensor import Tensor

Aggregation = Literal["per-image", "global"]
MaskLike = Union[np.ndarray, Tensor]


def _as_array(mask: MaskLike) -> np.ndarray:
    return mask.data if isinstance(mask, Tensor) else np.asarray(mask)


def binarize(prob: MaskLike, threshold: float = 0.5) -> np.ndarray:
    """Strict threshold: p > threshold is lesion."""
    return (_as_array(prob) > threshold).astype(np.uint8)


def confusion(pred_mask: MaskLike, gt_mask: MaskLike) -> ConfusionCounts:
    pred, gt = _as_array(pred_mask), _as_array(gt_mask)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    for name, m in (("prediction", pred), ("ground truth", gt)):
        if not np.all((m == 0) | (m == 1)):
            raise NonBinaryTargetError(f"{name} mask must contain only 0 and 1")
    p, g = pred.astype(bool), gt.astype(bool)
    tp = int(np.count_nonzero(p & g))
    tn = int(np.count_nonzero(~p & ~g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def _ratio(num: int, den: int, errors: int, name: str, degenerate: List[str]) -> float:
    # 0/0: perfect (1) when the matching error count is 0 as well, else 0
    if den == 0:
        degenerate.append(name)
        return 1.0 if errors == 0 else 0.0
    return num / den


def metrics(c: ConfusionCounts) -> MetricReport:
    degenerate: List[str] = []
    acc = _ratio(c.tp + c.tn, c.total, c.fp + c.fn, "acc", degenerate)
    sens = _ratio(c.tp, c.tp + c.fn, c.fn, "sens", degenerate)
    spec = _ratio(c.tn, c.tn + c.fp, c.fp, "spec", degenerate)
    ji = _ratio(c.tp, c.tp + c.fp + c.fn, c.fp + c.fn, "ji", degenerate)
    dsc = _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, c.fp + c.fn, "dsc", degenerate)
    return MetricReport(acc=acc, sens=sens, spec=spec, ji=ji, dsc=dsc, degenerate=degenerate)


def aggregate(counts: Sequence[ConfusionCounts], mode: Aggregation = "per-image") -> AggregateReport:
    """Dataset metrics: mean of per-image metrics (default) or metrics of summed counts."""
    if not counts:
        raise ValueError("cannot aggregate an empty list of confusion counts")
    per_image = [metrics(c) for c in counts]
    degenerate_counts: Dict[str, int] = {}
    for report in per_image:
        for name in report.degenerate:
            degenerate_counts[name] = degenerate_counts.get(name, 0) + 1

    if mode == "global":
        total = counts[0]
        for c in counts[1:]:
            total = total + c
        summary = metrics(total)
    elif mode == "per-image":
        means = {name: float(np.mean([getattr(r, name) for r in per_image])) for name in METRIC_NAMES}
        summary = MetricReport(**means, degenerate=sorted(degenerate_counts))
    else:
        raise ValueError(f"unknown aggregation mode {mode!r}")
    return AggregateReport(mode=mode, images=len(counts), metrics=summary, degenerate_counts=degenerate_counts)


def summarize_runs(reports: Iterable[MetricReport]) -> RunSummary:
    """Per-metric mean and sample standard deviation across repeated runs."""
    reports = list(reports)
    if not reports:
        raise ValueError("no runs to summarize")
    mean, std = {}, {}
    for name in METRIC_NAMES:
        values = np.array([getattr(r, name) for r in reports], dtype=np.float64)
        mean[name] = float(values.mean())
        std[name] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return RunSummary(runs=len(reports), mean=mean, std=std)


def format_report(report: MetricReport, title: str = "metrics") -> str:
    """Line-oriented text, values as percentages."""
    lines = [title]
    for name, value in report.values().items():
        lines.append(f"  {name.upper():<5} {100 * value:8.4f}")
    if report.degenerate:
        lines.append(f"  degenerate: {', '.join(report.degenerate)}")
    return "\n".join(lines)


def format_summary(summary: RunSummary) -> str:
    lines = [f"mean ± std over {summary.runs} runs"]
    for name in METRIC_NAMES:
        lines.append(f"  {name.upper():<5} {100 * summary.mean[name]:.2f} ± {100 * summary.std[name]:.2f}")
    return "\n".join(lines)


def metric_lines(report: MetricReport) -> List[str]:
    """``key=value`` lines, one metric per line, percentages to 4 decimals."""
    return [f"{name}={100 * value:.4f}" for name, value in report.values().items()]


def write_metric_file(path: Union[str, Path], report: MetricReport, extra: Optional[Dict[str, object]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{k}={v}" for k, v in (extra or {}).items()]
    lines.extend(metric_lines(report))
    if report.degenerate:
        lines.append(f"degenerate={','.join(report.degenerate)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def dsc_from_ji(ji: float) -> float:
    return 2 * ji / (1 + ji)
