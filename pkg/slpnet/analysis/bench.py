"""Forward-pass throughput."""

import logging
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from slpnet.core.errors import UsageError
from slpnet.nn.model import SLPNet, build
from slpnet.schemas.analysis import BenchReport
from slpnet.schemas.render import write_key_values
from slpnet.tensor.tensor import Tensor

logger = logging.getLogger(__name__)


def build_info() -> str:
    return f"python {platform.python_version()}, numpy {np.__version__}, {platform.machine() or 'unknown'}"


def _replica(model: SLPNet) -> SLPNet:
    copy = build(model.config)
    copy.param_store().load_state(model.param_store().state())
    return copy


def _time_forwards(model: SLPNet, x: Tensor, warmup: int, iters: int) -> List[float]:
    for _ in range(warmup):
        model(x)
    latencies = []
    for _ in range(iters):
        started = time.perf_counter()
        model(x)
        latencies.append(time.perf_counter() - started)
    return latencies


def bench_fps(
    model: SLPNet,
    input_size: Optional[Tuple[int, int]] = None,
    warmup: int = 10,
    iters: int = 100,
    batch: int = 1,
    instances: int = 1,
    seed: int = 0,
) -> BenchReport:
    """Time ``iters`` forwards after ``warmup`` untimed ones on a random input.

    FPS is images per wall-clock second over the timed section. With several
    instances each runs in its own thread on a replica of ``model`` and the
    FPS is the aggregate throughput.
    """
    if iters < 1 or warmup < 0 or batch < 1 or instances < 1:
        raise UsageError("bench needs iters >= 1, warmup >= 0, batch >= 1 and instances >= 1")
    h, w = input_size or model.config.input_size
    rng = np.random.default_rng(seed)
    x = Tensor(rng.random((batch, model.config.image_channels, h, w), dtype=np.float32))
    model._check_input(x.shape)

    if instances == 1:
        latencies = _time_forwards(model, x, warmup, iters)
        # warmup is excluded from the throughput window
        elapsed = sum(latencies)
    else:
        replicas = [model] + [_replica(model) for _ in range(instances - 1)]
        for replica in replicas:
            _time_forwards(replica, x, warmup, 0)
        with ThreadPoolExecutor(max_workers=instances) as pool:
            started = time.perf_counter()
            results = list(pool.map(lambda m: _time_forwards(m, x, 0, iters), replicas))
            elapsed = time.perf_counter() - started
        latencies = [lat for run in results for lat in run]

    fps = iters * batch * instances / elapsed
    lat_ms = np.array(latencies) * 1000.0
    report = BenchReport(
        input_size=(h, w),
        batch=batch,
        warmup=warmup,
        iters=iters,
        instances=instances,
        fps_mean=fps,
        lat_ms_mean=float(lat_ms.mean()),
        lat_ms_min=float(lat_ms.min()),
        lat_ms_max=float(lat_ms.max()),
        params=model.param_count(),
        seed=seed,
        build_info=build_info(),
    )
    logger.info("bench %dx%d batch %d: %.2f FPS, %.2f ms mean latency", h, w, batch, fps, report.lat_ms_mean)
    return report


def format_bench(report: BenchReport) -> str:
    h, w = report.input_size
    return "\n".join(
        [
            f"SLP-Net forward throughput at {h}x{w}, batch {report.batch}, {report.instances} instance(s)",
            f"FPS:     {report.fps_mean:.2f}",
            f"latency: mean {report.lat_ms_mean:.2f} ms, min {report.lat_ms_min:.2f} ms, max {report.lat_ms_max:.2f} ms",
            f"params:  {report.params:,d}",
            f"build:   {report.build_info}",
        ]
    )


def write_bench(report: BenchReport, path: Union[str, Path]) -> Path:
    return write_key_values(path, report, header="forward throughput, warmup excluded")
