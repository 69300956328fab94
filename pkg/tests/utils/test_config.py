import pytest

from src.errors import ParameterError
from src.utils.config import RunConfig, env_overrides, load_run_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for name in ('SMALLFIBERS_N', 'SMALLFIBERS_SEED', 'SMALLFIBERS_SAMPLES'):
        monkeypatch.setenv(name, '')
        monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)


def test_defaults():
    cfg = load_run_config()
    assert cfg == RunConfig()
    assert cfg.samples == 10_000 and cfg.seed == 0


def test_environment_is_cast(monkeypatch):
    monkeypatch.setenv('SMALLFIBERS_SEED', '7')
    assert env_overrides()['seed'] == 7
    assert load_run_config().seed == 7


def test_dotenv_file(tmp_path):
    dotenv = tmp_path / 'custom.env'
    dotenv.write_text('SMALLFIBERS_SAMPLES=2500\n', encoding='utf-8')
    assert load_run_config(dotenv_path=dotenv).samples == 2500


def test_layers_in_order(monkeypatch, tmp_path):
    monkeypatch.setenv('SMALLFIBERS_N', '5')
    config = tmp_path / 'run.yaml'
    config.write_text('n: 4\nq: 2\nunknown_key: 1\n', encoding='utf-8')
    cfg = load_run_config(config, {'q': 3, 'epsilon': None})
    assert (cfg.n, cfg.q, cfg.epsilon) == (4, 3, None)


def test_bad_value_rejected(tmp_path):
    config = tmp_path / 'run.toml'
    config.write_text('samples = "many"\n', encoding='utf-8')
    with pytest.raises(ParameterError):
        load_run_config(config)
