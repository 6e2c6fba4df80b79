import numpy as np

from helpers import DESK_CONFIG
from sadl import SynthSpec, generate_synthetic, make_dataset, save_config, save_dataset
from sadl.jobs import bench_job


def _combined_synthetic(path, seed=0):
    """Default synthetic spec, train and test pooled; bench re-splits."""
    train, test = generate_synthetic(SynthSpec(seed=seed))
    pooled = make_dataset(
        np.hstack([train.x, test.x]),
        np.concatenate([train.labels, test.labels]),
        train.class_count,
    )
    save_dataset(pooled, path)
    return pooled


def test_bench_accuracy_monotone_in_size(tmp_path):
    # Averaged over 5 realizations on the default synthetic spec, 64 atoms
    # should do at least as well as 8.
    data_path = tmp_path / "pool.ds"
    _combined_synthetic(data_path)
    cfg_path = tmp_path / "cfg"
    save_config(DESK_CONFIG.replace(max_iter=120), cfg_path)
    result = bench_job(cfg_path, data_path, sizes=[8, 64], realizations=5)
    by_size = {row["size"]: row["mean_accuracy"] for row in result["summary"]}
    assert by_size[64] >= by_size[8]
    assert by_size[64] >= 0.9


def test_bench_parallel_workers_match_sequential(tmp_path):
    data_path = tmp_path / "pool.ds"
    _combined_synthetic(data_path, seed=1)
    cfg_path = tmp_path / "cfg"
    save_config(DESK_CONFIG.replace(max_iter=30, seed=1), cfg_path)
    kwargs = dict(sizes=[8, 16], realizations=2)
    seq = bench_job(cfg_path, data_path, workers=1, **kwargs)
    par = bench_job(cfg_path, data_path, workers=4, **kwargs)

    def strip_timing(rows):
        return [(r["size"], r["realization"], r["accuracy"]) for r in rows]

    assert strip_timing(seq["rows"]) == strip_timing(par["rows"])


def test_bench_row_count(tmp_path):
    data_path = tmp_path / "pool.ds"
    _combined_synthetic(data_path, seed=2)
    cfg_path = tmp_path / "cfg"
    save_config(DESK_CONFIG.replace(max_iter=20, seed=2), cfg_path)
    result = bench_job(cfg_path, data_path, sizes=[8, 16], realizations=3)
    assert len(result["rows"]) == 6
    assert [(r["size"], r["realization"]) for r in result["rows"]] == [
        (8, 0), (8, 1), (8, 2), (16, 0), (16, 1), (16, 2)
    ]