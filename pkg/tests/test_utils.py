import csv
import io
import json
import logging

import pytest
from pydantic import ValidationError
from pythonjsonlogger import jsonlogger

from src.config import Settings
from src.exceptions import ConfigError
from src.models.reports import (
    ExperimentConfig,
    GrowthRow,
    GrowthTable,
    HeightRecord,
    PointRecord,
    Report,
    RunMode,
    RunStatus,
)
from src.utils import configure_logging, emit, list_presets, load_config, load_preset
from src.utils.emit import CSV_COLUMNS


def _point(D_V, value, point):
    return PointRecord(
        variety="x2=x1^2 + 1",
        point=point,
        D_V=D_V,
        coordinates=[],
        height=HeightRecord(value=value, radius=0.0, exact=True),
    )


@pytest.fixture
def report():
    config = ExperimentConfig(f="x^2+1", mode=RunMode.REPRODUCE, example_id=2, m_range=[1, 2])
    growth = GrowthTable(
        example_id=2,
        f="x^2 + 1",
        seed_point="1",
        growth_constant=0.69,
        rows=[
            GrowthRow(m=2, point=["1", "2", "26", "26"], height=7.2, radius=0.0, exact=True),
            GrowthRow(m=1, point=["1", "2", "5", "5"], height=3.9, radius=0.0, exact=True),
        ],
    )
    return Report(config=config, status=RunStatus.GROWTH, growth=growth)


def test_json_report_validates_back(report):
    payload = emit(report, "json")
    assert Report.model_validate_json(payload) == report
    assert json.loads(payload)["status"] == "growth"


def test_csv_rows_sorted_by_m(report):
    rows = list(csv.DictReader(io.StringIO(emit(report, "csv").decode("utf-8"))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [row["m"] for row in rows] == ["1", "2"]
    assert rows[0]["point"] == "1; 2; 5; 5"


def test_csv_puts_infinite_dv_last(report):
    report.samples = [_point(None, 0.5, ["0", "1"]), _point(2, 0.0, ["0", "1"])]
    rows = list(csv.DictReader(io.StringIO(emit(report, "csv").decode("utf-8"))))
    assert [row["m"] for row in rows] == ["1", "2", "2", ""]


def test_unknown_format(report):
    with pytest.raises(ValueError, match="unknown report format"):
        emit(report, "xml")


def test_exit_codes(report):
    assert report.exit_code == 0
    assert report.model_copy(update={"status": RunStatus.VIOLATION}).exit_code == 2
    assert report.model_copy(update={"status": RunStatus.REJECTED}).exit_code == 1
    assert report.model_copy(update={"status": RunStatus.XOA_EMPTY}).exit_code == 0


def test_presets_are_listed_and_load():
    names = list_presets()
    assert "line_experiment" in names
    for name in names:
        assert load_preset(name).name == name


def test_preset_overrides():
    config = load_preset("line_experiment", {"budget": 5, "seed": None})
    assert config.budget == 5
    assert config.seed == 0


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("missing")


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError, match="not JSON"):
        load_config(broken)
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps({"mode": "verify", "f": "x^2+1"}), encoding="utf-8")
    with pytest.raises(ConfigError, match="needs the equations of X"):
        load_config(incomplete)


@pytest.mark.parametrize(
    "fields",
    [
        {"f": "x^2+1", "mode": "reproduce", "example_id": 2, "m_range": [3, 1]},
        {"f": "x^2+1", "mode": "reproduce"},
        {"f": "x^2+1", "mode": "symmetry", "unexpected": True},
        {"f": "x^2+1", "mode": "symmetry", "budget": 0},
    ],
)
def test_experiment_config_validation(fields):
    with pytest.raises(ValidationError):
        ExperimentConfig(**fields)


def test_settings_validation():
    with pytest.raises(ValueError):
        Settings(PRECISION_BITS=10).validate()
    with pytest.raises(ValueError):
        Settings(LOG_FORMAT="xml").validate()
    Settings().validate()


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("DYNAHEIGHT_PERIOD_CAP", "12")
    monkeypatch.setenv("DYNAHEIGHT_JOBS", "3")
    loaded = Settings()
    assert loaded.PERIOD_CAP == 12
    assert loaded.jobs == 3


def test_configure_logging_json():
    logger = configure_logging("warning", "json")
    assert logger.name == "src"
    assert logger.level == logging.WARNING
    assert len(logger.handlers) == 1
    assert isinstance(logger.handlers[0].formatter, jsonlogger.JsonFormatter)


def test_configure_logging_text():
    logger = configure_logging("DEBUG", "text")
    assert not isinstance(logger.handlers[0].formatter, jsonlogger.JsonFormatter)
