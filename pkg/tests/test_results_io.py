import math

import numpy as np
import pytest

from analysis.stability import table1
from models.simulation_state import EnergyRecord, EnergyTrace, Snapshot
from parsers.results_io import (
    ENERGY_FILE,
    REGIME_FILE,
    TABLE1_COLUMNS,
    ResultsReader,
    ResultsWriter,
    parse_report_float,
)


def _trace():
    trace = EnergyTrace()
    for n in range(5):
        t = n * 0.1
        trace.append(EnergyRecord.compose(t, kinetic=1.0 / 3.0 + n, elastic=math.pi * n,
                                          fractional=1e-17 * n, delay=0.0, potential=2.0 / 7.0,
                                          sup_norm=math.e, running_sum=5.0))
    return trace


def test_energy_csv_keeps_full_precision(tmp_path):
    trace = _trace()
    ResultsWriter(str(tmp_path)).write_energy(trace)
    header = (tmp_path / ENERGY_FILE).read_text().splitlines()[0]
    assert header == "t,kinetic,elastic,fractional,delay,potential,total,sup_norm,running_sum"

    loaded = ResultsReader(str(tmp_path)).read_energy()
    assert np.array_equal(loaded.times(), trace.times())
    assert np.array_equal(loaded.totals(), trace.totals())
    assert loaded.records[3].elastic == trace.records[3].elastic
    assert all(r.running_sum == 5.0 for r in loaded.records)


def test_non_finite_energy_row_round_trip(tmp_path):
    trace = _trace()
    trace.append(EnergyRecord.compose(0.5, kinetic=1.0, elastic=math.inf, fractional=0.0, delay=0.0,
                                      potential=math.inf, sup_norm=1e200, running_sum=5.0))
    assert not trace.records[-1].is_finite()
    ResultsWriter(str(tmp_path)).write_energy(trace)
    assert (tmp_path / ENERGY_FILE).read_text().splitlines()[-1].startswith("0.5,1,inf,")

    last = ResultsReader(str(tmp_path)).read_energy().records[-1]
    assert math.isinf(last.elastic) and math.isinf(last.potential)
    assert math.isnan(last.total)
    assert not last.is_finite()

def test_snapshots_grouped_by_time(tmp_path):
    x = np.linspace(0.0, 1.0, 4)
    snapshots = [Snapshot(0.0, x, np.zeros(4)), Snapshot(0.5, x, np.array([0.0, 0.1, -0.2, 0.0]))]
    ResultsWriter(str(tmp_path)).write_snapshots(snapshots)
    loaded = ResultsReader(str(tmp_path)).read_snapshots()
    assert [s.t for s in loaded] == [0.0, 0.5]
    assert np.array_equal(loaded[1].values, snapshots[1].values)
    assert np.array_equal(loaded[0].x, x)


def test_report_values(tmp_path):
    ResultsWriter(str(tmp_path)).write_report(
        {"flag": True, "t_star": None, "E0": 0.1, "predicted": "BlowUp"}, REGIME_FILE)
    values = ResultsReader(str(tmp_path)).read_report(REGIME_FILE)
    assert values == {"flag": "true", "t_star": "none", "E0": "0.1", "predicted": "BlowUp"}
    assert math.isnan(parse_report_float(values["t_star"]))
    assert parse_report_float(values["E0"]) == 0.1


def test_config_file_reads_back(tmp_path, make_config):
    cfg = make_config(a2=0.25, **{"lambda": 3.5})
    ResultsWriter(str(tmp_path)).write_config(cfg)
    assert ResultsReader(str(tmp_path)).read_config() == cfg


def test_table1_file(tmp_path):
    path = str(tmp_path / "table.csv")
    rows = table1([4.0, 6.0])
    ResultsWriter(str(tmp_path)).write_table1(rows, path)
    frame = ResultsReader().read_table1(path)
    assert list(frame.columns) == TABLE1_COLUMNS
    assert frame["d"].tolist() == [rows[0].d, rows[1].d]


def test_map_keeps_column_order(tmp_path):
    rows = [{"a1": 1.0, "verdict": "Completed", "E0": 0.4, "w": None, "t_star": None}]
    ResultsWriter(str(tmp_path)).write_map(rows, ["a1", "verdict", "E0", "w", "t_star"])
    frame = ResultsReader(str(tmp_path)).read_frame("map.csv")
    assert list(frame.columns) == ["a1", "verdict", "E0", "w", "t_star"]
    assert frame.loc[0, "verdict"] == "Completed"


def test_writer_creates_missing_directory(tmp_path):
    out = tmp_path / "nested" / "run"
    ResultsWriter(str(out)).write_energy(_trace())
    assert (out / ENERGY_FILE).exists()


def test_missing_file_raises(tmp_path):
    with pytest.raises(OSError):
        ResultsReader(str(tmp_path)).read_report("absent.txt")
