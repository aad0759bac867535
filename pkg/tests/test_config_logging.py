import logging
import threading

import pytest
from pydantic import ValidationError

from src.config.configurations import DEFAULT_MESH_RATIO_THRESHOLD, get_settings, reload_settings
from src.logs.logger_config import LoggerConfig, get_cli_logger, get_tool_logger
from src.utils.exceptions import CssdParameterError
from src.utils.parallel import get_thread_count, ordered_map


class TestSettings:
    def test_defaults(self, clean_env):
        settings = get_settings()
        assert settings.threads >= 1
        assert settings.mesh_ratio_threshold == DEFAULT_MESH_RATIO_THRESHOLD
        assert settings.log_level == "INFO"
        assert settings.log_dir is None

    def test_read_from_environment(self, clean_env):
        clean_env.setenv("CSSD_THREADS", "3")
        clean_env.setenv("CSSD_MESH_RATIO_THRESHOLD", "50")
        clean_env.setenv("CSSD_LOG_LEVEL", "debug")
        settings = reload_settings()
        assert settings.threads == 3
        assert settings.mesh_ratio_threshold == 50.0
        assert settings.log_level == "DEBUG"
        assert settings.log_level_value == logging.DEBUG

    def test_settings_are_cached(self, clean_env):
        first = get_settings()
        clean_env.setenv("CSSD_THREADS", "2")
        assert get_settings() is first

    @pytest.mark.parametrize("name, value", [("CSSD_LOG_LEVEL", "LOUD"), ("CSSD_THREADS", "0")])
    def test_invalid_values(self, clean_env, name, value):
        clean_env.setenv(name, value)
        with pytest.raises(ValidationError):
            reload_settings()


class TestLogging:
    def test_no_log_files_without_directory(self, clean_env):
        assert LoggerConfig.log_run_summary({"command": "fit"}, "r1") is None

    def test_run_summary_written(self, clean_env, tmp_path):
        clean_env.setenv("CSSD_LOG_DIR", str(tmp_path))
        reload_settings()
        get_cli_logger()
        path = LoggerConfig.log_run_summary({"command": "fit", "objective": 1.5}, "r2")
        content = open(path, encoding="utf-8").read()
        assert path.startswith(str(tmp_path))
        assert '"objective": 1.5' in content

    def test_loggers_are_reused(self, clean_env):
        assert get_cli_logger() is get_cli_logger()
        assert LoggerConfig.get_logger("CssdCli") is get_cli_logger()

    def test_tool_events_reach_stderr(self, clean_env, capsys):
        get_tool_logger("Sample").info("sample event", value=7)
        err = capsys.readouterr().err
        assert "event='sample event'" in err
        assert "value=7" in err


class TestParallel:
    def test_thread_count_capped_by_settings(self, clean_env):
        clean_env.setenv("CSSD_THREADS", "2")
        reload_settings()
        assert get_thread_count() == 2
        assert get_thread_count(8) == 2
        assert get_thread_count(1) == 1

    def test_thread_count_must_be_positive(self, clean_env):
        with pytest.raises(CssdParameterError):
            get_thread_count(0)

    def test_order_is_kept(self, clean_env):
        clean_env.setenv("CSSD_THREADS", "4")
        reload_settings()
        assert ordered_map(lambda v: v * v, range(20), threads=4) == [v * v for v in range(20)]

    def test_single_thread_runs_inline(self, clean_env):
        names = ordered_map(lambda _: threading.current_thread().name, range(3), threads=1)
        assert names == [threading.current_thread().name] * 3

    def test_exceptions_propagate(self, clean_env):
        def fail(v):
            raise ValueError(v)

        clean_env.setenv("CSSD_THREADS", "2")
        reload_settings()
        with pytest.raises(ValueError):
            ordered_map(fail, [1, 2], threads=2)
