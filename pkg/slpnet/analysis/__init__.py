from slpnet.analysis.bench import bench_fps, format_bench, write_bench
from slpnet.analysis.complexity import analyze, format_table, write_report

__all__ = ["analyze", "bench_fps", "format_bench", "format_table", "write_bench", "write_report"]
