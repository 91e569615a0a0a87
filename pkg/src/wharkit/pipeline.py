"""End-to-end orchestration: download -> standardize -> window.

Each stage is guarded by a content digest over exactly the config fields
that influence it; a matching digest skips the stage entirely. Windowing
fans out one task per session, sequentially or over a process pool, and the
resulting metadata is ordered by (session_id, window_index) regardless of
execution order. Manifest digests are written only after all stage outputs
are durable, so a killed run redoes its stage completely.
"""

from __future__ import annotations

import hashlib
import logging
import os
import shutil
import statistics
import time
import zipfile
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

import requests

from .config import Stage, WharConfig, stage_hash
from .model import DatasetIndex, SessionMetadata, WindowMetadata, build_index
from .parsers import get_parser, validate_standardized
from .storage import (
    DatasetLayout,
    clear_stage_outputs,
    read_activity_table,
    read_manifest,
    read_metadata_tables,
    read_session,
    read_session_table,
    update_manifest,
    write_activity_table,
    write_session,
    write_session_table,
    write_window,
    write_window_table,
)
from .transforms import filter_activities, generate_windows, resample, select_channels

logger = logging.getLogger("wharkit.pipeline")

DOWNLOAD_ATTEMPTS = 3
DOWNLOAD_BACKOFF_S = 1.0  # doubles after each failed attempt
DOWNLOAD_CHUNK = 1 << 20
_ARCHIVE_SHA_FILE = ".archive_sha256"


class PipelineError(RuntimeError):
    pass


class NetworkError(PipelineError):
    pass


class StandardizationError(PipelineError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


def _is_local(url: str) -> Path | None:
    parsed = urlparse(url)
    if parsed.scheme == "file":
        return Path(parsed.path)
    if parsed.scheme in ("", None) or (len(parsed.scheme) == 1 and os.name == "nt"):
        return Path(url)
    return None


def _fetch(url: str, dest: Path) -> None:
    delay = DOWNLOAD_BACKOFF_S
    last_error: Exception | None = None
    for attempt in range(1, DOWNLOAD_ATTEMPTS + 1):
        try:
            with requests.get(url, stream=True, timeout=60) as resp:
                resp.raise_for_status()
                with open(dest, "wb") as f:
                    for chunk in resp.iter_content(chunk_size=DOWNLOAD_CHUNK):
                        f.write(chunk)
            return
        except requests.RequestException as e:
            last_error = e
            logger.warning("download attempt %d/%d failed: %s", attempt, DOWNLOAD_ATTEMPTS, e)
            if attempt < DOWNLOAD_ATTEMPTS:
                time.sleep(delay)
                delay *= 2
    raise NetworkError(f"download failed after {DOWNLOAD_ATTEMPTS} attempts: {url}: {last_error}")


def _is_archive(path: Path) -> bool:
    if zipfile.is_zipfile(path):
        return True
    return any(str(path).endswith(ext) for fmt in shutil.get_unpack_formats() for ext in fmt[1])


def _extract(archive: Path, into: Path) -> None:
    try:
        shutil.unpack_archive(str(archive), str(into))
    except (shutil.ReadError, ValueError) as e:
        raise PipelineError(f"cannot extract {archive}: {e}") from e
    # some upstream archives nest a second zip one level down
    for nested in sorted(into.rglob("*.zip")):
        if nested == archive:
            continue
        shutil.unpack_archive(str(nested), str(nested.parent))


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(DOWNLOAD_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def ensure_downloaded(cfg: WharConfig, force: bool = False) -> Path:
    """Fetch and extract the raw dataset unless the cached copy is current."""
    layout = DatasetLayout.from_config(cfg)
    layout.ensure_dirs()
    digest = stage_hash(cfg, Stage.DOWNLOAD).digest
    manifest = read_manifest(layout)
    if (
        not force
        and manifest.digest_for(Stage.DOWNLOAD) == digest
        and any(layout.raw_dir.iterdir())
    ):
        logger.info("%s: download cache hit", cfg.dataset_id)
        return layout.raw_dir

    previous_sha = None
    sha_path = layout.raw_dir / _ARCHIVE_SHA_FILE
    if sha_path.exists():
        previous_sha = sha_path.read_text().strip()
    clear_stage_outputs(layout, Stage.DOWNLOAD)

    local = _is_local(cfg.download_url)
    if local is not None:
        if not local.exists():
            raise PipelineError(f"local dataset path does not exist: {local}")
        if local.is_dir():
            shutil.copytree(local, layout.raw_dir, dirs_exist_ok=True)
        else:
            target = layout.raw_dir / local.name
            shutil.copy2(local, target)
            if _is_archive(target):
                _extract(target, layout.raw_dir)
    else:
        name = Path(urlparse(cfg.download_url).path).name or "download.bin"
        target = layout.raw_dir / name
        logger.info("%s: downloading %s", cfg.dataset_id, cfg.download_url)
        _fetch(cfg.download_url, target)
        new_sha = _sha256_file(target)
        if previous_sha and previous_sha != new_sha:
            logger.warning(
                "%s: re-downloaded archive hash changed (%s -> %s)",
                cfg.dataset_id,
                previous_sha[:12],
                new_sha[:12],
            )
        (layout.raw_dir / _ARCHIVE_SHA_FILE).write_text(new_sha + "\n")
        if _is_archive(target):
            _extract(target, layout.raw_dir)

    update_manifest(layout, Stage.DOWNLOAD, digest)
    return layout.raw_dir


def ensure_standardized(cfg: WharConfig, force: bool = False) -> DatasetIndex:
    """Parse raw data into persisted sessions + metadata unless cached.

    Returns an index over activities and sessions; the windows table is
    empty until the windowing stage runs.
    """
    layout = DatasetLayout.from_config(cfg)
    layout.ensure_dirs()
    digest = stage_hash(cfg, Stage.STANDARDIZE).digest
    manifest = read_manifest(layout)
    if (
        not force
        and manifest.digest_for(Stage.STANDARDIZE) == digest
        and layout.activity_table_path.exists()
        and layout.session_table_path.exists()
    ):
        logger.info("%s: standardize cache hit", cfg.dataset_id)
        return build_index(read_activity_table(layout), read_session_table(layout), ())

    raw_dir = ensure_downloaded(cfg)
    parser = get_parser(cfg.parser_id)
    logger.info("%s: parsing with %s v%d", cfg.dataset_id, parser.parser_id, parser.parser_version)
    result = parser.parse(raw_dir, cfg)

    report = validate_standardized(result, cfg)
    for issue in report.warnings():
        logger.warning("%s: %s: %s", cfg.dataset_id, issue.location, issue.message)
    if not report.ok:
        details = "; ".join(f"{i.location}: {i.message}" for i in report.errors())
        raise StandardizationError(
            f"{cfg.dataset_id}: standardized output failed validation: {details}",
            report=report,
        )

    clear_stage_outputs(layout, Stage.STANDARDIZE)
    for meta, data in result.sessions:
        write_session(layout, meta.session_id, data)
    activities = tuple(result.activities)
    sessions = tuple(meta for meta, _ in result.sessions)
    write_activity_table(layout, activities)
    write_session_table(layout, sessions)
    update_manifest(layout, Stage.STANDARDIZE, digest)
    return build_index(activities, sessions, ())


def _process_session(
    layout: DatasetLayout, cfg: WharConfig, meta: SessionMetadata
) -> tuple[int, list[WindowMetadata]]:
    """Windowing task for one session; runs in a worker process."""
    data = read_session(layout, meta.session_id)
    data = select_channels(data, cfg.sensor_channels)
    if cfg.resampling_freq is not None:
        data = resample(data, cfg.resampling_freq)
    windows, window_meta = generate_windows(
        data, meta.session_id, cfg.window_time, cfg.window_overlap, cfg.effective_freq
    )
    for wm, w in zip(window_meta, windows):
        write_window(layout, wm.window_id, w)
    return meta.session_id, window_meta


def ensure_windowed(
    cfg: WharConfig,
    force: bool = False,
    parallel: bool | None = None,
    jobs: int | None = None,
) -> DatasetIndex:
    """Produce persisted windows + metadata unless cached.

    parallel overrides cfg.in_parallel when given; jobs bounds the worker
    pool (default: available cores). Results are ordered by
    (session_id, window_index) regardless of scheduling.
    """
    layout = DatasetLayout.from_config(cfg)
    layout.ensure_dirs()
    digest = stage_hash(cfg, Stage.WINDOWING).digest
    manifest = read_manifest(layout)
    if (
        not force
        and manifest.digest_for(Stage.WINDOWING) == digest
        and layout.window_table_path.exists()
    ):
        logger.info("%s: windowing cache hit", cfg.dataset_id)
        return read_metadata_tables(layout)

    index = ensure_standardized(cfg)
    kept_sessions, _ = filter_activities(index.sessions, index.activities, cfg.activity_names)
    kept_sessions = sorted(kept_sessions, key=lambda s: s.session_id)
    clear_stage_outputs(layout, Stage.WINDOWING)

    use_parallel = cfg.in_parallel if parallel is None else parallel
    results: list[tuple[int, list[WindowMetadata]]] = []
    if use_parallel and len(kept_sessions) > 1:
        workers = jobs or os.cpu_count() or 1
        logger.info("%s: windowing %d sessions on %d workers", cfg.dataset_id, len(kept_sessions), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_process_session, layout, cfg, meta): meta.session_id
                for meta in kept_sessions
            }
            for future in as_completed(futures):
                session_id = futures[future]
                try:
                    results.append(future.result())
                except Exception as e:
                    for f in futures:
                        f.cancel()
                    raise PipelineError(f"windowing failed for session {session_id}: {e}") from e
    else:
        logger.info("%s: windowing %d sessions sequentially", cfg.dataset_id, len(kept_sessions))
        for meta in kept_sessions:
            try:
                results.append(_process_session(layout, cfg, meta))
            except Exception as e:
                raise PipelineError(f"windowing failed for session {meta.session_id}: {e}") from e

    # impose deterministic order after collection, never trust scheduling
    results.sort(key=lambda r: r[0])
    windows = tuple(wm for _, metas in results for wm in metas)
    write_window_table(layout, windows)
    update_manifest(layout, Stage.WINDOWING, digest)
    return build_index(index.activities, index.sessions, windows)


def run_all(
    cfg: WharConfig,
    force: bool = False,
    parallel: bool | None = None,
    jobs: int | None = None,
) -> DatasetIndex:
    """Compose the three stages; force ignores every cached digest."""
    ensure_downloaded(cfg, force=force)
    ensure_standardized(cfg, force=force)
    return ensure_windowed(cfg, force=force, parallel=parallel, jobs=jobs)


@dataclass(frozen=True)
class BenchmarkReport:
    sequential_s: float
    parallel_s: float
    speedup: float
    repetitions: int


def benchmark(cfg: WharConfig, repetitions: int = 3, jobs: int | None = None) -> BenchmarkReport:
    """Time the windowing stage with caches cleared, sequential vs parallel.

    Reports median wall times over `repetitions` runs each and the speedup
    sequential/parallel.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    ensure_standardized(cfg)

    def timed(parallel: bool) -> list[float]:
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            ensure_windowed(cfg, force=True, parallel=parallel, jobs=jobs)
            times.append(time.perf_counter() - start)
        return times

    sequential = statistics.median(timed(parallel=False))
    parallel = statistics.median(timed(parallel=True))
    return BenchmarkReport(
        sequential_s=sequential,
        parallel_s=parallel,
        speedup=sequential / parallel if parallel > 0 else float("inf"),
        repetitions=repetitions,
    )
