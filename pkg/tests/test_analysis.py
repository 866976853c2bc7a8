"""Tests for the complexity report and the throughput benchmark."""

import pytest

from slpnet.analysis import analyze, bench_fps, format_bench, format_table, write_bench, write_report
from slpnet.core.errors import IndivisibleSizeError, UsageError
from slpnet.nn.model import build


@pytest.fixture(scope="module")
def model():
    return build()


def test_default_analysis(model):
    report = analyze(model)
    assert report.input_size == (224, 224)
    assert report.params == 103802
    assert report.flops == 1154093472
    assert report.gflops == pytest.approx(1.154, abs=1e-3)
    assert report.params_mb == pytest.approx(103802 * 4 / 2**20)
    assert report.module("slp3").params == 19712
    assert report.module("sfa2").params == 20545
    assert sum(m.params for m in report.modules) == report.params


def test_analysis_ignores_seed():
    a, b = analyze(build(seed=0)), analyze(build(seed=5))
    assert a.params == b.params
    assert a.flops == b.flops
    assert [m.flops for m in a.modules] == [m.flops for m in b.modules]


def test_halving_the_input_quarters_the_flops(model):
    assert analyze(model, (224, 224)).flops == 4 * analyze(model, (112, 112)).flops


def test_analysis_rejects_indivisible_size(model):
    with pytest.raises(IndivisibleSizeError):
        analyze(model, (100, 100))


def test_table_and_report_file(model, tmp_path):
    report = analyze(model)
    table = format_table(report)
    assert "slp3" in table
    assert "103,802" in table
    assert "GFLOPs: 1.154" in table
    assert "(0.40 MB)" in table

    lines = write_report(report, tmp_path / "analysis.txt").read_text().splitlines()
    assert lines[0].startswith("# FLOPs count one multiply-add")
    assert "params=103802" in lines
    assert "flops=1154093472" in lines
    assert "modules.0.name=pyramid" in lines


def test_bench_report(tiny_model, tmp_path):
    report = bench_fps(tiny_model, (32, 32), warmup=1, iters=3)
    assert report.input_size == (32, 32)
    assert report.iters == 3
    assert report.params == 103802
    assert report.fps_mean > 0
    assert report.lat_ms_min <= report.lat_ms_mean <= report.lat_ms_max
    assert "FPS:" in format_bench(report)
    assert "fps_mean=" in write_bench(report, tmp_path / "bench.txt").read_text()


def test_single_iteration_fps_is_inverse_latency(tiny_model):
    report = bench_fps(tiny_model, (32, 32), warmup=0, iters=1)
    assert report.fps_mean == pytest.approx(1000.0 / report.lat_ms_mean, rel=1e-9)


def test_bench_batch_and_instances(tiny_model):
    report = bench_fps(tiny_model, (32, 32), warmup=0, iters=2, batch=2, instances=2)
    assert report.batch == 2
    assert report.instances == 2
    assert report.fps_mean > 0


def test_bench_argument_errors(tiny_model):
    with pytest.raises(UsageError):
        bench_fps(tiny_model, (32, 32), iters=0)
    with pytest.raises(IndivisibleSizeError):
        bench_fps(tiny_model, (30, 30), iters=1)


@pytest.mark.slow
def test_bench_is_stable(model):
    first = bench_fps(model, warmup=5, iters=20)
    second = bench_fps(model, warmup=5, iters=20)
    assert abs(first.fps_mean - second.fps_mean) / first.fps_mean < 0.10
