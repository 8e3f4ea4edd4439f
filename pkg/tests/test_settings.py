import pytest

from src.core.errors import ConfigError
from src.core.settings import Settings, load_settings, ordered_map


class TestLoadSettings:
    def test_defaults(self):
        assert load_settings({}) == Settings()

    def test_values(self):
        settings = load_settings(
            {
                "DYNISO_THREADS": "4",
                "DYNISO_DEBUG": "yes",
                "DYNISO_LOG_LEVEL": "debug",
                "DYNISO_LOG_FILE": "run.log",
                "DYNISO_DISTANCE_FLOOR": "1e-6",
                "DYNISO_MAX_RETRIES": "0",
            }
        )
        assert settings == Settings(4, True, "DEBUG", "run.log", 1e-6, 0)

    @pytest.mark.parametrize("level", ["trace", " Info ", "SUCCESS"])
    def test_log_levels_known_to_loguru(self, level):
        assert load_settings({"DYNISO_LOG_LEVEL": level}).log_level == level.strip().upper()

    def test_blank_values_fall_back(self):
        settings = load_settings({"DYNISO_THREADS": " ", "DYNISO_LOG_FILE": ""})
        assert settings.threads == 1
        assert settings.log_file is None

    @pytest.mark.parametrize(
        "env",
        [
            {"DYNISO_THREADS": "two"},
            {"DYNISO_THREADS": "0"},
            {"DYNISO_DEBUG": "maybe"},
            {"DYNISO_DISTANCE_FLOOR": "tiny"},
            {"DYNISO_DISTANCE_FLOOR": "-1"},
            {"DYNISO_MAX_RETRIES": "-3"},
            {"DYNISO_LOG_LEVEL": "LOUD"},
        ],
    )
    def test_malformed(self, env):
        with pytest.raises(ConfigError):
            load_settings(env)


class TestOrderedMap:
    @pytest.mark.parametrize("workers", [1, 4])
    def test_keeps_order(self, workers):
        assert ordered_map(lambda x: x * x, range(10), workers) == [x * x for x in range(10)]

    def test_empty(self):
        assert ordered_map(str, [], 4) == []
