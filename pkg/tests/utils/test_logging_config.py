import logging
import sys

import pytest

from src.utils.logging_config import setup_logging


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    saved, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.handlers = saved
    root.setLevel(level)


def test_repeated_setup_keeps_stderr_usable(capsys):
    setup_logging(log_level='INFO')
    setup_logging(log_level='INFO')
    logging.getLogger('smallfibers.test').warning('fibre volume ε ok')
    assert 'fibre volume ε ok' in capsys.readouterr().err
    assert not sys.stderr.closed
    assert len(logging.getLogger().handlers) == 1


def test_file_handler_logs_debug(tmp_path):
    log_file = setup_logging(tmp_path / 'logs', log_level='DEBUG', console_output=False)
    logging.getLogger('smallfibers.test').debug('written to file only')
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert log_file.name.startswith('smallfibers_')
    assert 'written to file only' in log_file.read_text(encoding='utf-8')


def test_no_log_dir_returns_none():
    assert setup_logging(console_output=False) is None
    assert logging.getLogger().handlers == []
