import logging
from pathlib import Path

import pytest

import syzlab
from syzlab import Syzlab, SyzlabSettings
from syzlab.exceptions import ParameterError
from syzlab.logging_config import log_action, log_verdicts, setup_logging


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("SYZLAB_PRIME", "101")
    monkeypatch.setenv("SYZLAB_USE_CACHE", "no")
    monkeypatch.setenv("SYZLAB_CACHE_DIR", str(tmp_path))
    settings = SyzlabSettings.from_env()
    assert settings.prime == 101
    assert settings.use_cache is False
    assert settings.cache_dir == Path(tmp_path)
    assert settings.log_dir is None


def test_configure_rejects_unknown_setting():
    client = Syzlab(settings=SyzlabSettings())
    client.configure(prime=101, seed=4)
    assert (client.settings.prime, client.settings.seed) == (101, 4)
    with pytest.raises(AttributeError, match="Unknown syzlab setting 'primes'"):
        client.configure(primes=7)


def test_module_level_wrappers_use_default_client():
    syzlab.set_default_client(Syzlab(settings=SyzlabSettings()))
    assert syzlab.koszul_dim("rnc d=3", 1, 1) == 3
    assert syzlab.betti("rnc d=3", 2).get(2, 1) == 2
    assert syzlab.certify("theta.div4", g=5, p=1).passed


def test_log_action_records_success_and_failure(caplog):
    @log_action("Double")
    def double(x):
        return 2 * x

    @log_action()
    def broken():
        raise ParameterError("no")

    caplog.set_level(logging.INFO, logger="syzlab")
    assert double(4) == 8
    with pytest.raises(ParameterError):
        broken()
    assert "→ Double(4)" in caplog.text
    assert "✓ Double completed" in caplog.text
    assert "✗ Broken failed" in caplog.text


def test_log_verdicts_warns_on_failures(caplog):
    caplog.set_level(logging.INFO, logger="syzlab")
    log_verdicts("Suite", {"a": True, "b": False})
    assert "1/2 checks passed" in caplog.text
    assert any(r.levelno == logging.WARNING and "b" in r.getMessage() for r in caplog.records)


def test_setup_logging_writes_a_run_log(tmp_path):
    logger = setup_logging(tmp_path)
    try:
        assert list((tmp_path / "logs").glob("syzlab_*.log"))
    finally:
        for handler in logger.handlers:
            handler.close()
        setup_logging()
