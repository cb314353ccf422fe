import csv
import importlib.util
from pathlib import Path


def test_benchmark_writes_csv(tmp_path):
    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    out = tmp_path / "b.csv"
    mod.main(["--sizes", "300", "--repeat", "1", "--csv", str(out)])
    rows = list(csv.DictReader(out.open()))
    assert {r["kernel"] for r in rows} == {"peel", "sync_rounds", "improve_passes"}
    assert all(float(r["seconds"]) >= 0 for r in rows)
