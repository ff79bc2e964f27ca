import json

import pytest
from click.testing import CliRunner

from src.config import settings
from src.main import main

BASE = ["--jobs", "1", "--log-level", "ERROR"]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def line_file(tmp_path):
    path = tmp_path / "line.txt"
    path.write_text("# x2 = x1 + 1\nx2-x1-1\n", encoding="utf-8")
    return path


def invoke(runner, *args):
    return runner.invoke(main, BASE + list(args))


def test_classify(runner):
    result = invoke(runner, "classify", "--f", "x^2-2")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["label"] == "chebyshev(+)"


def test_classify_rejects_linear_maps(runner):
    assert invoke(runner, "classify", "--f", "x").exit_code == 1


def test_weil_height(runner):
    result = invoke(runner, "heights", "weil", "3/2")
    data = json.loads(result.stdout)
    assert data["height"]["exact"] is True
    assert data["height"]["value"] == pytest.approx(1.0986122886681098)


def test_canonical_height_of_a_fixed_point(runner):
    result = invoke(runner, "heights", "canonical", "--f", "x^2-2", "--point", "2")
    assert json.loads(result.stdout)["canonical_height"]["value"] == 0


def test_tate_table(runner):
    rows = json.loads(invoke(runner, "heights", "tate", "--f", "x^2+1", "--m", "3", "--point", "1").stdout)
    assert [row["k"] for row in rows] == [0, 1, 2, 3]


def test_tate_of_infinity_fails_cleanly(runner):
    result = invoke(runner, "heights", "tate", "--f", "x^2+1", "--point", "inf")
    assert result.exit_code == 1
    assert "infinity" in result.stderr


def test_commute_group(runner):
    result = invoke(runner, "commute", "group", "--f", "x^3+x")
    assert json.loads(result.stdout)["order"] == 2


def test_commute_list(runner):
    result = invoke(runner, "commute", "list", "--f", "x^2+1", "--max-deg", "4")
    assert [c["g"] for c in json.loads(result.stdout)] == ["x", "x^2 + 1", "x^4 + 2*x^2 + 2"]


def test_commute_group_of_chebyshev_fails(runner):
    assert invoke(runner, "commute", "group", "--f", "x^2-2").exit_code == 1


def test_enumerate_count(runner):
    result = invoke(runner, "varieties", "enumerate", "--n", "2", "--codim", "1", "--count")
    assert json.loads(result.stdout)["count"] == 4


def test_enumerate_lists_signatures(runner):
    result = invoke(runner, "varieties", "enumerate", "--n", "2", "--codim", "1")
    assert len(json.loads(result.stdout)) == 4


def test_enumerate_periodic_varieties_of_a_map(runner):
    settings.SAMPLE_PERIOD_MAX = 1
    result = invoke(runner, "varieties", "enumerate", "--n", "2", "--codim", "1", "--f", "x^2+1", "--max-gen-deg", "2")
    assert result.exit_code == 0
    found = json.loads(result.stdout)
    assert all({"signature", "generators", "D_V"} <= set(V) for V in found)
    assert {"2": "x^2 + 1"} in [V["generators"] for V in found]

    counted = invoke(
        runner, "varieties", "enumerate", "--n", "2", "--codim", "1", "--f", "x^2+1", "--max-gen-deg", "2", "--count"
    )
    assert json.loads(counted.stdout)["count"] == len(found)


def test_enumerate_generator_degree_needs_a_map(runner):
    result = invoke(runner, "varieties", "enumerate", "--n", "2", "--codim", "1", "--max-gen-deg", "2")
    assert result.exit_code == 1
    assert "--max-gen-deg needs --f" in result.stderr


def test_canonical_height_to_a_target_error(runner):
    result = invoke(runner, "heights", "canonical", "--f", "x^2+1", "--point", "1", "--err", "1e-6")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["canonical_height"]["radius"] <= 1e-6


@pytest.mark.parametrize(
    "args",
    [
        ["classify", "x^2-2"],
        ["heights", "canonical", "--f", "x^2-2", "2"],
        ["commute", "list", "--f", "x^2+1", "--degree", "4"],
        ["--no-such-flag", "presets"],
    ],
)
def test_usage_errors_exit_like_rejected_configs(runner, args):
    result = invoke(runner, *args)
    assert result.exit_code == 1


def test_presets(runner):
    result = invoke(runner, "presets")
    assert result.stdout.split() == [
        "growth_example_1",
        "growth_example_2",
        "line_experiment",
        "line_structure",
        "symmetry_x3_plus_x",
    ]


def test_verify_with_chebyshev_map_is_rejected(runner, line_file):
    result = invoke(runner, "bounds", "verify", "--x", str(line_file), "--f", "x^2-2")
    assert result.exit_code == 1
    assert json.loads(result.stdout)["status"] == "rejected"


def test_certify_infers_dimensions(runner, line_file):
    result = invoke(
        runner, "bounds", "certify", "--x", str(line_file), "--f", "x^2+1", "--signature", '{"chains": [[1, 2]]}'
    )
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["config"]["n"] == 2
    assert data["certificate"]["M"] == 9


def test_structure_written_to_file(runner, line_file, tmp_path):
    output = tmp_path / "report.json"
    result = invoke(runner, "bounds", "structure", "--x", str(line_file), "--f", "x^2+1", "--output", str(output))
    assert result.exit_code == 0
    assert json.loads(output.read_text(encoding="utf-8"))["structure"]["M"] == 9


def test_reproduce_csv(runner):
    result = invoke(runner, "bounds", "reproduce", "--example", "2", "--f", "x^2+1", "--m", "1..3", "--format", "csv")
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "m,variety,point,height,radius,exact"
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3"]


def test_reproduce_rejects_bad_range(runner):
    result = invoke(runner, "bounds", "reproduce", "--example", "2", "--f", "x^2+1", "--m", "abc")
    assert result.exit_code == 1


def test_run_preset(runner):
    result = invoke(runner, "run", "--preset", "line_structure")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["structure"]["M"] == 9


def test_run_config_file_with_override(runner, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"mode": "symmetry", "f": "x^3+x", "max_gen_deg": 3}), encoding="utf-8")
    result = invoke(runner, "run", "--config", str(path), "--max-gen-deg", "1")
    assert result.exit_code == 0
    assert len(json.loads(result.stdout)["symmetry"]["commuters"]) == 2


@pytest.mark.parametrize("args", [[], ["--preset", "line_structure", "--config", "x.json"]])
def test_run_needs_exactly_one_source(runner, args):
    assert invoke(runner, "run", *args).exit_code == 1


def test_run_unknown_preset(runner):
    result = invoke(runner, "run", "--preset", "nope")
    assert result.exit_code == 1
    assert "unknown preset" in result.stderr


def test_precision_too_low(runner):
    result = runner.invoke(main, ["--precision-bits", "10", "presets"])
    assert result.exit_code == 1
