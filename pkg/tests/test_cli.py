import json

import pytest
import yaml

from wharkit.cli import main

from conftest import example_config_dict


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def synthetic_config_path(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys,
        "generate-synthetic",
        "--subjects", "2",
        "--activities", "2",
        "--duration", "8",
        "--freq", "50",
        "--channels", "2",
        "--seed", "0",
        "--out", str(tmp_path / "syn"),
    )
    assert code == 0
    config_line = [l for l in out.splitlines() if l.startswith("config:")][0]
    return config_line.split(":", 1)[1].strip()


def test_info_builtin_summary(capsys):
    code, out, _ = run_cli(capsys, "info", "uci_har")
    assert code == 0
    assert "30 subjects, 6 activities, 50 Hz" in out


def test_info_json(capsys):
    code, out, _ = run_cli(capsys, "info", "wisdm", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["num_of_subjects"] == 36
    assert payload["sampling_freq"] == 20
    assert payload["cached_stages"] == []


def test_unknown_dataset_exits_2(capsys):
    code, _, err = run_cli(capsys, "info", "not_a_dataset")
    assert code == 2
    assert "available" in err


def test_validate_bad_config_exits_4(tmp_path, capsys):
    bad = example_config_dict(window_overlap=1.0)
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(bad))
    code, _, err = run_cli(capsys, "validate", "--config", str(path))
    assert code == 4
    assert "window_overlap" in err


def test_validate_good_config(tmp_path, capsys, synthetic_config_path):
    code, out, _ = run_cli(capsys, "validate", "--config", synthetic_config_path)
    assert code == 0
    assert "config ok" in out


def test_preprocess_sequential_then_parallel_counts_match(capsys, synthetic_config_path):
    code, out, _ = run_cli(capsys, "preprocess", "--config", synthetic_config_path, "--sequential")
    assert code == 0
    first = out.strip().splitlines()[-1]

    code, out, _ = run_cli(
        capsys, "preprocess", "--config", synthetic_config_path, "--parallel", "--force"
    )
    assert code == 0
    second = out.strip().splitlines()[-1]
    assert first == second
    assert "4 sessions" in first  # 2 subjects x 2 activities
    # 400 samples, window 128, stride 64 -> 5 windows per session
    assert "20 windows" in first


def test_preprocess_json_reports_window_ids(capsys, synthetic_config_path):
    code, out, _ = run_cli(capsys, "preprocess", "--config", synthetic_config_path, "--json")
    assert code == 0
    payload = json.loads(out.strip().splitlines()[-1])
    assert payload["sessions"] == 4
    assert payload["windows"] == 20
    assert payload["window_ids"][:5] == ["0_0", "0_1", "0_2", "0_3", "0_4"]


def test_validate_after_standardize_reports_output(capsys, synthetic_config_path):
    run_cli(capsys, "preprocess", "--config", synthetic_config_path)
    code, out, _ = run_cli(capsys, "validate", "--config", synthetic_config_path, "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True


def test_download_local_archive(capsys, synthetic_config_path):
    code, out, _ = run_cli(capsys, "download", "--config", synthetic_config_path)
    assert code == 0
    assert "raw data at" in out


def test_download_unreachable_exits_3(tmp_path, capsys, monkeypatch):
    import wharkit.pipeline as pl

    monkeypatch.setattr(pl, "DOWNLOAD_BACKOFF_S", 0.0)

    import requests

    monkeypatch.setattr(
        pl.requests, "get", lambda *a, **k: (_ for _ in ()).throw(requests.ConnectionError())
    )
    cfg = example_config_dict(
        download_url="http://203.0.113.1/x.zip",
        parser_id="synthetic",
        datasets_dir=str(tmp_path / "d"),
    )
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(cfg))
    code, _, err = run_cli(capsys, "download", "--config", str(path))
    assert code == 3
    assert "network error" in err


def test_bench_json(capsys, synthetic_config_path):
    code, out, _ = run_cli(
        capsys, "bench", "--config", synthetic_config_path, "--reps", "1", "--json"
    )
    assert code == 0
    payload = json.loads(out.strip().splitlines()[-1])
    assert payload["sequential_s"] > 0
    assert payload["parallel_s"] > 0
    assert "speedup" in payload


def test_bench_table_output(capsys, synthetic_config_path):
    code, out, _ = run_cli(capsys, "bench", "--config", synthetic_config_path, "--reps", "1")
    assert code == 0
    assert "sequential" in out and "parallel" in out and "speedup" in out


def test_missing_args_config_error(capsys):
    code, _, err = run_cli(capsys, "preprocess")
    assert code == 2


def test_stub_parser_fails_with_extension_pointer(capsys, tmp_path):
    src = tmp_path / "raw"
    src.mkdir()
    (src / "data.txt").write_text("placeholder")
    cfg = example_config_dict(
        dataset_id="pamap2",
        parser_id="pamap2",
        download_url=str(src),
        datasets_dir=str(tmp_path / "d"),
    )
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(cfg))
    code, _, err = run_cli(capsys, "preprocess", "--config", str(path))
    assert code == 1
    assert "not implemented" in err
