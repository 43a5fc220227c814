# tests/test_config.py
import pytest

from config import RunConfig, SynthConfig, TrainConfig, load_run_config


def test_file_then_flags(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# desk run\nembedding_size = 10\nsynth.m = 4\nlam=0.1\nfolds = 5\n")
    config = load_run_config(str(path), {"embedding_size": 30, "jobs": 3})
    assert config.train.embedding_size == 30
    assert config.train.lam == 0.1
    assert config.synth.m == 4
    assert config.eval.folds == 5
    assert config.jobs == 3


def test_unknown_key_reports_line(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("epochs = 3\n\nbogus = 1\n")
    with pytest.raises(ValueError, match=r"run.conf:3: unknown config key 'bogus'"):
        load_run_config(str(path))


def test_malformed_lines(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("epochs 3\n")
    with pytest.raises(ValueError, match="expected 'key = value'"):
        load_run_config(str(path))
    path.write_text("epochs = three\n")
    with pytest.raises(ValueError, match="cannot parse 'three' as int"):
        load_run_config(str(path))


def test_bool_and_section_keys():
    config = RunConfig().apply({"infrequent_curve": "off", "synth.seed": "9", "seed": "2"})
    assert config.eval.infrequent_curve is False
    assert config.synth.seed == 9
    assert config.train.seed == 2


def test_environment_defaults(monkeypatch):
    monkeypatch.setenv("CSH_SEED", "5")
    monkeypatch.setenv("CSH_JOBS", "4")
    assert TrainConfig().seed == 5
    assert RunConfig().jobs == 4


def test_train_validation():
    with pytest.raises(ValueError, match="unknown method"):
        TrainConfig(method="hpnn").validate()
    with pytest.raises(ValueError, match="threshold"):
        TrainConfig(threshold=1.0).validate()
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0).validate()
    with pytest.raises(ValueError, match="m must satisfy"):
        SynthConfig(m=11).validate()


def test_grid_notices():
    assert TrainConfig(embedding_size=20, num_layers=2).grid_notices() == []
    notices = TrainConfig(embedding_size=3, num_layers=4).grid_notices()
    assert len(notices) == 2 and "embedding_size=3" in notices[0]


def test_hash_ignores_jobs_and_paths():
    a, b = RunConfig(), RunConfig()
    a.train.seed = b.train.seed = 0
    b.jobs = a.jobs + 3
    b.paths.output_dir = "elsewhere"
    assert a.config_hash() == b.config_hash()
    b.train.lam = 0.5
    assert a.config_hash() != b.config_hash()
    assert list(a.resolved_dict()) == sorted(a.resolved_dict())
