import shutil
import time
from pathlib import Path

import numpy as np
import pytest

from wharkit import pipeline as pl
from wharkit.config import Stage, load_config_file, validate_config
from wharkit.parsers import Parser, get_parser, register, write_synthetic_dataset
from wharkit.parsers.synthetic import parse_synthetic
from wharkit.pipeline import (
    NetworkError,
    PipelineError,
    StandardizationError,
    benchmark,
    ensure_downloaded,
    ensure_standardized,
    ensure_windowed,
    run_all,
)
from wharkit.storage import DatasetLayout, read_manifest, read_window


def snapshot(root: Path) -> dict[str, int]:
    """Map of relative path -> mtime_ns for every file under root."""
    return {
        str(p.relative_to(root)): p.stat().st_mtime_ns
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


@pytest.fixture
def small_cfg(tmp_path):
    config_path, _ = write_synthetic_dataset(
        out_dir=tmp_path / "syn",
        num_subjects=2,
        num_activities=3,
        duration_s=10.0,
        freq=50.0,
        num_channels=3,
        seed=0,
    )
    return load_config_file(config_path)


class TestDownload:
    def test_local_zip_extracts_fixture_tree(self, small_cfg):
        raw_dir = ensure_downloaded(small_cfg)
        files = sorted(p.name for p in raw_dir.rglob("*.csv"))
        assert len(files) == 6
        assert files[0] == "subject_0_activity_0.csv"

    def test_second_call_is_noop(self, small_cfg):
        raw_dir = ensure_downloaded(small_cfg)
        before = snapshot(raw_dir)
        ensure_downloaded(small_cfg)
        assert snapshot(raw_dir) == before

    def test_missing_local_path(self, small_cfg, tmp_path):
        cfg = validate_config(
            dict(small_cfg.model_dump(mode="json"), download_url=str(tmp_path / "gone.zip"))
        )
        with pytest.raises(PipelineError, match="does not exist"):
            ensure_downloaded(cfg)

    def test_unreachable_url_errors_after_retries(self, small_cfg, monkeypatch):
        monkeypatch.setattr(pl, "DOWNLOAD_BACKOFF_S", 0.0)
        attempts = []

        import requests

        def fail(url, **kwargs):
            attempts.append(url)
            raise requests.ConnectionError("refused")

        monkeypatch.setattr(pl.requests, "get", fail)
        cfg = validate_config(
            dict(small_cfg.model_dump(mode="json"), download_url="http://203.0.113.1/x.zip")
        )
        with pytest.raises(NetworkError, match="after 3 attempts"):
            ensure_downloaded(cfg)
        assert len(attempts) == 3

    def test_local_directory_source(self, small_cfg, tmp_path):
        src = tmp_path / "rawsrc"
        src.mkdir()
        (src / "subject_0_activity_0.csv").write_text("timestamp,ch_0\n0,1.0\n20000,2.0\n")
        cfg = validate_config(
            dict(
                small_cfg.model_dump(mode="json"),
                download_url=str(src),
                dataset_id="dirsource",
            )
        )
        raw_dir = ensure_downloaded(cfg)
        assert (raw_dir / "subject_0_activity_0.csv").exists()


class TestStandardize:
    def test_fresh_run_persists_one_file_per_pair(self, small_cfg):
        index = ensure_standardized(small_cfg)
        layout = DatasetLayout.from_config(small_cfg)
        files = sorted(layout.sessions_dir.glob("session_*.parquet"))
        assert len(files) == 2 * 3
        assert len(index.sessions) == 6
        assert len(index.windows) == 0

    def test_rerun_rewrites_nothing(self, small_cfg):
        ensure_standardized(small_cfg)
        layout = DatasetLayout.from_config(small_cfg)
        before = snapshot(layout.sessions_dir)
        ensure_standardized(small_cfg)
        assert snapshot(layout.sessions_dir) == before

    def test_parser_version_bump_reparses(self, small_cfg):
        layout = DatasetLayout.from_config(small_cfg)
        ensure_standardized(small_cfg)
        first = read_manifest(layout).digest_for(Stage.STANDARDIZE)
        sessions_before = snapshot(layout.sessions_dir)
        original = get_parser("synthetic")
        register(Parser("synthetic", original.parser_version + 1, parse_synthetic))
        try:
            ensure_standardized(small_cfg)
        finally:
            register(original)
        assert read_manifest(layout).digest_for(Stage.STANDARDIZE) != first
        assert snapshot(layout.sessions_dir) != sessions_before

    def test_validation_failure_aborts(self, small_cfg, monkeypatch):
        def broken_parse(raw_dir, cfg):
            result = parse_synthetic(raw_dir, cfg)
            result.sessions[0][1].channels["ch_0"][3] = np.nan
            return result

        register(Parser("synthetic", 1, broken_parse))
        try:
            with pytest.raises(StandardizationError) as exc:
                ensure_standardized(small_cfg)
            assert exc.value.report is not None
            assert not exc.value.report.ok
        finally:
            register(Parser("synthetic", 1, parse_synthetic))
        layout = DatasetLayout.from_config(small_cfg)
        assert read_manifest(layout).digest_for(Stage.STANDARDIZE) is None


class TestWindowing:
    def test_window_counts(self, small_cfg):
        # 500 samples, window 128, stride 64 -> floor((500-128)/64)+1 = 6
        index = ensure_windowed(small_cfg)
        assert len(index.windows) == 6 * 6
        layout = DatasetLayout.from_config(small_cfg)
        assert len(list(layout.windows_dir.glob("window_*.parquet"))) == 36

    def test_metadata_ordered_by_session_then_index(self, small_cfg):
        index = ensure_windowed(small_cfg)
        ids = list(index.window_ids)
        expected = [f"{s}_{i}" for s in range(6) for i in range(6)]
        assert ids == expected

    def test_parallel_equals_sequential(self, small_cfg, tmp_path):
        layout = DatasetLayout.from_config(small_cfg)
        index_seq = ensure_windowed(small_cfg, force=True, parallel=False)
        seq_tables = {
            p.name: p.read_bytes() for p in layout.metadata_dir.glob("*.parquet")
        }
        seq_values = {wid: read_window(layout, wid).values for wid in index_seq.window_ids}

        index_par = ensure_windowed(small_cfg, force=True, parallel=True, jobs=3)
        par_tables = {
            p.name: p.read_bytes() for p in layout.metadata_dir.glob("*.parquet")
        }
        assert index_par.window_ids == index_seq.window_ids
        assert seq_tables == par_tables  # byte-identical metadata
        for wid in index_par.window_ids:
            assert np.array_equal(read_window(layout, wid).values, seq_values[wid])

    def test_rerun_touches_nothing(self, small_cfg):
        ensure_windowed(small_cfg)
        layout = DatasetLayout.from_config(small_cfg)
        before = snapshot(layout.root)
        ensure_windowed(small_cfg)
        run_all(small_cfg)
        assert snapshot(layout.root) == before

    def test_overlap_change_regenerates_windows_only(self, small_cfg):
        ensure_windowed(small_cfg)
        layout = DatasetLayout.from_config(small_cfg)
        sessions_before = snapshot(layout.sessions_dir)
        windows_before = snapshot(layout.windows_dir)

        changed = validate_config(
            dict(small_cfg.model_dump(mode="json"), window_overlap=0.25)
        )
        index = ensure_windowed(changed)
        assert snapshot(layout.sessions_dir) == sessions_before
        assert snapshot(layout.windows_dir) != windows_before
        # 500 samples, stride 96 -> floor((500-128)/96)+1 = 4
        assert len(index.windows) == 4 * 6

    def test_failing_session_aborts_with_id(self, small_cfg, monkeypatch):
        real = pl.read_session

        def flaky(layout, session_id):
            if session_id == 3:
                raise RuntimeError("synthetic corruption")
            return real(layout, session_id)

        monkeypatch.setattr(pl, "read_session", flaky)
        with pytest.raises(PipelineError, match="session 3"):
            ensure_windowed(small_cfg, parallel=False)

    def test_crash_mid_windowing_redoes_stage(self, small_cfg, monkeypatch):
        layout = DatasetLayout.from_config(small_cfg)
        count = {"writes": 0}
        real = pl.write_window

        def crashing(layout_, wid, w):
            count["writes"] += 1
            if count["writes"] > 10:
                raise KeyboardInterrupt("simulated kill")
            real(layout_, wid, w)

        monkeypatch.setattr(pl, "write_window", crashing)
        with pytest.raises((KeyboardInterrupt, PipelineError)):
            ensure_windowed(small_cfg, parallel=False)
        # manifest has no windowing digest, so the stage is not considered done
        assert read_manifest(layout).digest_for(Stage.WINDOWING) is None

        monkeypatch.setattr(pl, "write_window", real)
        index = ensure_windowed(small_cfg)
        assert len(index.windows) == 36
        files = {p.name for p in layout.windows_dir.glob("window_*.parquet")}
        assert files == {f"window_{wid}.parquet" for wid in index.window_ids}


class TestCacheMatrix:
    """Field mutations must invalidate exactly the stages that consume them."""

    @pytest.fixture
    def warm(self, small_cfg):
        run_all(small_cfg)
        layout = DatasetLayout.from_config(small_cfg)
        return small_cfg, layout

    def mutate(self, cfg, **kv):
        return validate_config(dict(cfg.model_dump(mode="json"), **kv))

    @pytest.mark.parametrize(
        "field,value",
        [
            ("window_overlap", 0.25),
            ("window_time", 1.28),
            ("sensor_channels", ["ch_1", "ch_0"]),
            ("resampling_freq", 25.0),
            ("activity_names", ["activity_0", "activity_1"]),
        ],
    )
    def test_windowing_only_fields(self, warm, field, value):
        cfg, layout = warm
        raw_before = snapshot(layout.raw_dir)
        sessions_before = snapshot(layout.sessions_dir)
        windows_before = snapshot(layout.windows_dir)
        run_all(self.mutate(cfg, **{field: value}))
        assert snapshot(layout.raw_dir) == raw_before
        assert snapshot(layout.sessions_dir) == sessions_before
        assert snapshot(layout.windows_dir) != windows_before

    def test_learning_rate_regenerates_nothing(self, warm):
        cfg, layout = warm
        before = snapshot(layout.root)
        run_all(self.mutate(cfg, learning_rate=0.5))
        assert snapshot(layout.root) == before

    def test_unchanged_rerun_touches_no_files(self, warm):
        cfg, layout = warm
        before = snapshot(layout.root)
        run_all(cfg)
        assert snapshot(layout.root) == before

    def test_parser_version_regenerates_sessions_and_windows(self, warm):
        cfg, layout = warm
        raw_before = snapshot(layout.raw_dir)
        sessions_before = snapshot(layout.sessions_dir)
        windows_before = snapshot(layout.windows_dir)
        original = get_parser("synthetic")
        register(Parser("synthetic", original.parser_version + 1, parse_synthetic))
        try:
            run_all(cfg)
        finally:
            register(original)
        assert snapshot(layout.raw_dir) == raw_before
        assert snapshot(layout.sessions_dir) != sessions_before
        assert snapshot(layout.windows_dir) != windows_before

    def test_download_url_regenerates_everything(self, warm, tmp_path):
        cfg, layout = warm
        # same bytes under a new name: all three stage digests change
        src = Path(cfg.download_url)
        other = src.with_name("copy_" + src.name)
        shutil.copy2(src, other)
        before = snapshot(layout.root)
        run_all(self.mutate(cfg, download_url=str(other)))
        after = snapshot(layout.root)
        changed = {k for k in before if before[k] != after.get(k)}
        assert any(k.startswith("raw") for k in changed)
        assert any(k.startswith("sessions") for k in changed)
        assert any(k.startswith("windows") for k in changed)

    def test_force_ignores_manifest(self, warm):
        cfg, layout = warm
        before = snapshot(layout.windows_dir)
        run_all(cfg, force=True)
        assert snapshot(layout.windows_dir) != before


class TestUciFixtureEndToEnd:
    def test_zip_to_windows(self, tmp_path):
        from conftest import example_config_dict, write_uci_fixture, zip_tree

        tree = write_uci_fixture(
            tmp_path / "build",
            rows=[(1, 1)] * 4 + [(1, 2)] * 3 + [(2, 1)] * 4,
            split_sizes={"train": 7, "test": 4},
        )
        archive = zip_tree(tree, tmp_path / "uci_fixture.zip")
        cfg = validate_config(
            example_config_dict(
                dataset_id="uci_fixture",
                parser_id="uci_har",
                download_url=str(archive),
                datasets_dir=str(tmp_path / "datasets"),
                num_of_subjects=2,
                activity_names=["walking", "walking_upstairs"],
                sensor_channels=["body_acc_x", "body_gyro_y", "total_acc_z"],
            )
        )
        index = run_all(cfg, parallel=False)
        # runs: (1,1)x4 -> 320 samples, (1,2)x3 -> 256, (2,1)x4 -> 320
        assert len(index.sessions) == 3
        # windows at 128/50%: 320 -> 4, 256 -> 3, 320 -> 4
        assert len(index.windows) == 4 + 3 + 4
        layout = DatasetLayout.from_config(cfg)
        w = read_window(layout, index.window_ids[0])
        assert w.values.shape == (128, 3)
        assert w.channels == ("body_acc_x", "body_gyro_y", "total_acc_z")


class TestBenchmark:
    def test_report_structure(self, small_cfg):
        report = benchmark(small_cfg, repetitions=1)
        assert report.sequential_s > 0
        assert report.parallel_s > 0
        assert report.speedup == pytest.approx(report.sequential_s / report.parallel_s)
        assert report.repetitions == 1

    def test_tiny_dataset_completes(self, tmp_path):
        # 4 short sessions: multiprocessing overhead may dominate; the
        # report must still be produced
        config_path, _ = write_synthetic_dataset(
            out_dir=tmp_path / "tiny",
            num_subjects=2,
            num_activities=2,
            duration_s=4.0,
            freq=50.0,
            num_channels=2,
            seed=1,
        )
        cfg = load_config_file(config_path)
        report = benchmark(cfg, repetitions=1)
        assert report.parallel_s > 0

    def test_bad_repetitions(self, small_cfg):
        with pytest.raises(ValueError):
            benchmark(small_cfg, repetitions=0)
