import pytest
import structlog

from liftfunnel.config import get_config, settings
from liftfunnel.core.errors import ConfigError
from liftfunnel.schemas import CSV_COLUMNS, ExperimentConfig, MeasureKind
from liftfunnel.utils.logging import setup_logging
from liftfunnel.utils.validation import (
    arithmetic_grid,
    parse_float_list,
    parse_kv_text,
    validate_epsilon_grid,
    validate_refinements,
)


class TestValidation:
    def test_epsilon_grid(self):
        assert validate_epsilon_grid([0.1, 0.2]) == (True, [])
        ok, errors = validate_epsilon_grid([0.2, 0.1, -1.0])
        assert not ok
        assert len(errors) == 3

    def test_refinements(self):
        assert validate_refinements([1, 5], 2)[0]
        ok, errors = validate_refinements([0], 2)
        assert not ok
        assert len(errors) == 2

    def test_arithmetic_grid(self):
        grid = arithmetic_grid(0.005, 0.17, 0.015)
        assert len(grid) == 12
        assert grid[0] == 0.005
        assert grid[-1] == 0.17

    def test_arithmetic_grid_bad_step(self):
        with pytest.raises(ValueError):
            arithmetic_grid(0.1, 0.2, 0.0)

    def test_parse_float_list(self):
        assert parse_float_list("0.1, 0.2,,0.3") == [0.1, 0.2, 0.3]
        with pytest.raises(ValueError):
            parse_float_list("0.1,abc")

    def test_parse_kv_text(self):
        text = "# header\ns_size = 3\n\nseed=9  # trailing\nseed=10\n"
        assert parse_kv_text(text) == {"s_size": "3", "seed": "10"}

    def test_parse_kv_text_quotes_and_duplicates(self, mocker):
        logger = mocker.patch("liftfunnel.utils.validation.logger")
        entries = parse_kv_text("output_path = \"runs/a b.csv\"\nkinds=chi_sq, ell_one # measures\nkinds=semi_mi\n")
        assert entries == {"output_path": "runs/a b.csv", "kinds": "semi_mi"}
        logger.warning.assert_called_once()
        assert logger.warning.call_args.kwargs["key"] == "kinds"

    def test_parse_kv_text_bare_key(self):
        with pytest.raises(ValueError):
            parse_kv_text("seed\n")

    @pytest.mark.parametrize("text", ["no equals sign", "=3"])
    def test_parse_kv_text_errors(self, text):
        with pytest.raises(ValueError):
            parse_kv_text(text)


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert (cfg.s_size, cfg.x_size, cfg.num_instances) == (4, 7, 10)
        assert cfg.sweep.epsilons == arithmetic_grid(0.005, 0.17, 0.015)
        assert cfg.sweep.refinement_counts[-1] == 100
        assert cfg.kinds == [MeasureKind.SEMI_MI]
        assert not cfg.record_timing

    def test_from_mapping(self):
        cfg = ExperimentConfig.from_mapping({
            "s_size": "3",
            "epsilons": "0.01,0.02",
            "refinement": "2",
            "final_refinement": "10",
            "delta": "0.1",
            "kinds": "chi_sq, ell_one",
            "record_timing": "TRUE",
        })
        assert cfg.s_size == 3
        assert cfg.sweep.refinement_counts == [2, 10]
        assert cfg.sweep.delta == 0.1
        assert cfg.kinds == [MeasureKind.CHI_SQ, MeasureKind.ELL_ONE]
        assert cfg.record_timing

    def test_grid_keys(self):
        cfg = ExperimentConfig.from_mapping({"eps_start": "0.01", "eps_stop": "0.05", "eps_step": "0.01"})
        assert cfg.sweep.epsilons == [0.01, 0.02, 0.03, 0.04, 0.05]

    @pytest.mark.parametrize("entries", [
        {"unknown": "1"},
        {"s_size": "one"},
        {"s_size": "1"},
        {"kinds": "semi_mi,semi_mi"},
        {"kinds": "hellinger"},
        {"record_timing": "yes"},
        {"delta": "1.5"},
        {"epsilons": "0.2,0.1"},
        {"seed": "-1"},
    ])
    def test_invalid(self, entries):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping(entries)

    def test_from_file(self, tmp_path):
        path = tmp_path / "experiment.cfg"
        path.write_text("num_instances = 2\nseed = 17\noutput_path = out/x.csv\n")
        cfg = ExperimentConfig.from_file(str(path))
        assert (cfg.num_instances, cfg.seed, cfg.output_path) == (2, 17, "out/x.csv")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file(str(tmp_path / "absent.cfg"))


def test_global_settings():
    assert get_config() is settings
    assert ExperimentConfig().output_path.startswith(settings.output_dir)


def test_csv_columns_keep_fixed_prefix():
    assert CSV_COLUMNS == [
        "instance_id", "measure", "mechanism_name", "epsilon", "utility_nats", "normalized_utility",
        "leakage_mi_nats", "max_lift", "log_max_lift", "max_measure", "candidate_count", "wall_time_ms",
        "display_leakage",
    ]


def test_setup_logging_processor_chain(monkeypatch):
    monkeypatch.setattr(settings, "log_format", "json")
    setup_logging()
    processors = structlog.get_config()["processors"]
    assert isinstance(processors[-1], structlog.processors.JSONRenderer)
    assert not any(
        isinstance(p, (structlog.stdlib.PositionalArgumentsFormatter, structlog.processors.UnicodeDecoder))
        for p in processors
    )
    monkeypatch.setattr(settings, "log_format", "console")
    setup_logging()
    assert isinstance(structlog.get_config()["processors"][-1], structlog.dev.ConsoleRenderer)
