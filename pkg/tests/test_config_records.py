import json
from fractions import Fraction

import pytest

from rotvisits.config import ConfigError, ExperimentConfig, load_json, parse_rational
from rotvisits.montecarlo import run_experiment
from rotvisits.records import ResultRecord, histogram_csv, simulate

RAW = {
    "d": 3,
    "M": 10,
    "intervals": [{"xi": "1/2", "tau": 0, "sigma": 1}, {"xi": "irr:sqrt2", "tau": "1/4", "sigma": "3/2"}],
    "samples": 500,
    "seed": 12,
}


def test_from_dict_basic():
    cfg = ExperimentConfig.from_dict(RAW)
    assert cfg.box.N == 100
    assert cfg.intervals[1].tau == Fraction(1, 4)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("patch,where", [
    ({"d": 1}, "d"),
    ({"d": "3"}, "d"),
    ({"samples": -1}, "samples"),
    ({"bogus": 1}, "bogus"),
    ({"intervals": []}, "intervals"),
    ({"intervals": [{"xi": "1/2", "sigma": 0}]}, "intervals[0].sigma"),
    ({"intervals": [{"xi": "1/2", "sigma": "x"}]}, "intervals[0].sigma"),
    ({"intervals": [{"xi": "irr:nope", "sigma": 1}]}, "intervals[0].xi"),
    ({"intervals": [{"sigma": 1}]}, "intervals[0].xi"),
    ({"intervals": [{"xi": "0", "sigma": 80}]}, "intervals[0].sigma"),
    ({"law": {"kind": "beta"}}, "law"),
])
def test_field_path_errors(patch, where):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict({**RAW, **patch})
    assert err.value.where == where


def test_missing_scale_and_precision_guard():
    raw = {k: v for k, v in RAW.items() if k != "M"}
    with pytest.raises(ConfigError, match="N"):
        ExperimentConfig.from_dict(raw)
    with pytest.raises(ConfigError, match="sigma"):
        ExperimentConfig.from_dict({**raw, "N": 1e12, "d": 2,
                                    "intervals": [{"xi": "0", "sigma": "1/10000"}]})


def test_inconsistent_box():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict({**RAW, "N": 1000})
    assert err.value.where == "M"


def test_json_errors_report_position():
    with pytest.raises(ConfigError) as err:
        load_json('{\n  "d": 2,\n  "M": ,\n}', "exp.json")
    assert err.value.where == "exp.json:3:8"


def test_parse_rational():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational(0.1) == Fraction(1, 10)
    for bad in (True, "1/0", float("inf"), None):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_record_round_trip_is_byte_identical():
    rec = simulate(ExperimentConfig.from_dict(RAW))
    text = rec.to_json()
    again = ResultRecord.from_json(text)
    assert again.to_json() == text
    assert again.histogram.cells == rec.histogram.cells


def test_record_reproduces_from_embedded_config():
    rec = simulate(ExperimentConfig.from_dict(RAW))
    raw = json.loads(rec.to_json())
    rerun = run_experiment(ExperimentConfig.from_dict(raw["config"]))
    assert rerun.cells == rec.histogram.cells
    assert raw["box"] == {"d": 3, "M": 10, "N": 100, "expected_mean_scale": 1.0}
    assert "runtime" in raw and "runtime" not in json.loads(rec.to_json(include_runtime=False))


def test_record_contents():
    rec = simulate(ExperimentConfig.from_dict(RAW))
    orders = [tuple(m["order"]) for m in rec.moments]
    assert orders == [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
    assert rec.covariance[0][1] == rec.covariance[1][0]
    assert 0 <= rec.diagnostics["tv"] <= 1
    empty = simulate(ExperimentConfig.from_dict({**RAW, "samples": 0}))
    assert empty.moments == [] and empty.diagnostics["tv"] is None
    assert json.loads(empty.to_json())["histogram"]["cells"] == []


def test_histogram_csv_schema():
    rec = simulate(ExperimentConfig.from_dict(RAW))
    lines = histogram_csv(rec.histogram).splitlines()
    assert lines[0] == "x1,x2,tally"
    assert sum(int(line.split(",")[-1]) for line in lines[1:]) == 500
