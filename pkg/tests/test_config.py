"""
Tests for configuration validation and logger setup
"""
import importlib
import logging

import config.settings as settings
from src.cli import main
from src.logger_config import ProjectLogger, get_logger


def test_defaults_are_valid():
    status = settings.validate_configuration()
    assert status["valid"], status["errors"]
    assert status["errors"] == []


def test_out_of_range_overrides_are_reported(monkeypatch):
    monkeypatch.setattr(settings, "DEFAULT_ALPHA", 1.5)
    monkeypatch.setattr(settings, "DEFAULT_LSB_DEPTH", 4)
    status = settings.validate_configuration()
    assert not status["valid"]
    assert any("STEGO_HAWK_ALPHA" in error for error in status["errors"])
    assert any("STEGO_HAWK_LSB_DEPTH" in error for error in status["errors"])


def test_non_numeric_override_falls_back_and_is_reported(monkeypatch):
    monkeypatch.setattr(settings, "_PARSE_ERRORS", [])
    monkeypatch.setenv("STEGO_HAWK_HAWKS", "thirty")
    monkeypatch.setenv("STEGO_HAWK_ALPHA", "half")
    assert settings._env_number("STEGO_HAWK_HAWKS", "30", int) == 30
    assert settings._env_number("STEGO_HAWK_ALPHA", "0.5", float) == 0.5
    status = settings.validate_configuration()
    assert not status["valid"]
    assert any("STEGO_HAWK_HAWKS" in error and "'thirty'" in error for error in status["errors"])
    assert any("STEGO_HAWK_ALPHA" in error and "'half'" in error for error in status["errors"])


def test_settings_import_survives_non_numeric_override(monkeypatch):
    monkeypatch.setenv("STEGO_HAWK_WORKERS", "4x")
    try:
        importlib.reload(settings)
        assert settings.DEFAULT_WORKERS == 1
        assert any("STEGO_HAWK_WORKERS" in error for error in settings.validate_configuration()["errors"])
    finally:
        monkeypatch.delenv("STEGO_HAWK_WORKERS")
        importlib.reload(settings)
    assert settings.validate_configuration()["valid"]


def test_non_numeric_override_makes_cli_exit_2(monkeypatch, capsys):
    monkeypatch.setattr(settings, "_PARSE_ERRORS", ["STEGO_HAWK_SEED must be an integer, got 'abc'"])
    assert main(["metrics", "--cover", "a.png", "--stego", "b.png"]) == 2
    assert "STEGO_HAWK_SEED" in capsys.readouterr().err


def test_invalid_environment_makes_cli_exit_2(monkeypatch, capsys):
    monkeypatch.setattr(settings, "DEFAULT_HAWKS", 1)
    assert main(["metrics", "--cover", "a.png", "--stego", "b.png"]) == 2
    assert "STEGO_HAWK_HAWKS" in capsys.readouterr().err


def test_get_logger_is_namespaced_and_cached():
    first = get_logger("config_test")
    second = get_logger("config_test")
    assert first is second
    assert first.name == "stego_hawk.config_test"
    assert not first.propagate


def test_console_level_applies_to_existing_loggers():
    logger = get_logger("verbosity_test")
    ProjectLogger.set_console_level("DEBUG")
    console = [h for h in logger.handlers if not isinstance(h, logging.FileHandler)]
    assert console and all(h.level == logging.DEBUG for h in console)
    ProjectLogger.set_console_level("WARNING")
    assert all(h.level == logging.WARNING for h in console)


def test_log_files_info_shape():
    info = ProjectLogger.get_log_files_info()
    assert info["logs_directory"] == str(settings.LOGS_DIR)
    assert isinstance(info["log_files"], dict)
