"""Parameter and FLOP report."""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

from slpnet.nn.model import SLPNet, params_mb
from slpnet.schemas.analysis import AnalysisReport
from slpnet.schemas.render import write_key_values

logger = logging.getLogger(__name__)


def analyze(model: SLPNet, input_size: Optional[Tuple[int, int]] = None) -> AnalysisReport:
    """Per-module and total cost at ``input_size``; a pure function of the config."""
    size = tuple(input_size or model.config.input_size)
    modules = model.module_costs(size)
    params = model.param_count()
    flops = sum(m.flops for m in modules)
    return AnalysisReport(
        input_size=size,
        modules=modules,
        params=params,
        params_mb=params_mb(params),
        flops=flops,
        gflops=flops / 1e9,
        seed=model.config.seed,
    )


def format_table(report: AnalysisReport) -> str:
    h, w = report.input_size
    lines = [
        f"SLP-Net complexity at {h}x{w} ({report.flop_convention})",
        f"{'module':<10} {'params':>10} {'MFLOPs':>10}  output",
    ]
    for m in report.modules:
        shape = "x".join(str(d) for d in m.output_shape[1:])
        lines.append(f"{m.name:<10} {m.params:>10,d} {m.flops / 1e6:>10.2f}  {shape}")
    lines.append(f"{'total':<10} {report.params:>10,d} {report.flops / 1e6:>10.2f}")
    lines.append(f"params: {report.params / 1e6:.3f}M ({report.params_mb:.2f} MB)   reference: {report.reference_params / 1e6:.2f}M")
    lines.append(f"GFLOPs: {report.gflops:.3f}   reference: {report.reference_gflops:.2f}")
    return "\n".join(lines)


def write_report(report: AnalysisReport, path: Union[str, Path]) -> Path:
    path = write_key_values(path, report, header=report.flop_convention)
    logger.info("wrote analysis report %s", path)
    return path
