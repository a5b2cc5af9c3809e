import csv
import json
import random

import pytest
from click.testing import CliRunner

from aggsculpt.cli import main

from conftest import DATA


def invoke(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def run_cars(tmp_path, script, extra=()):
    script_file = tmp_path / "script.txt"
    script_file.write_text(script, encoding="utf-8")
    out = tmp_path / "out"
    return invoke([
        "run", "--data", str(DATA / "cars.csv"),
        "--nominal", "cylinders", "--nominal", "year",
        "--script", str(script_file), "--out", str(out), *extra,
    ]), out


def test_empty_script_outputs_initial_layout(tmp_path):
    result, out = run_cars(tmp_path, "")
    assert result.exit_code == 0, result.output
    layout = json.loads((out / "layout-1.json").read_text())
    assert layout["nX"] == 1 and layout["cells"][0]["count"] == 32
    assert (out / "substrate-1.svg").exists()
    assert (out / "session-log.json").exists()


def test_partition_script(tmp_path):
    result, out = run_cars(tmp_path, "partition h cylinders\npartition v origin\n")
    assert result.exit_code == 0, result.output
    layout = json.loads((out / "layout-1.json").read_text())
    assert layout["nX"] == 3 and layout["nY"] == 3
    svg = (out / "substrate-1.svg").read_text()
    assert svg.count("<circle") == sum(1 for c in layout["cells"] if c["count"])


def test_pile_and_project_bins_via_quoted_tokens(tmp_path):
    script = (
        "configure mpg bins=0,10,20,30,40\n"
        "partition h mpg\n"
        'select h "mpg=[0, 10)" "mpg=[10, 20)"\n'
        'pile poor fuel economy\n'
        'select h "poor fuel economy"\n'
        "project low economy cars\n"
    )
    result, out = run_cars(tmp_path, script)
    assert result.exit_code == 0, result.output
    source = json.loads((out / "layout-1.json").read_text())
    target = json.loads((out / "layout-2.json").read_text())
    assert target["substrateName"] == "low economy cars"
    assert sum(c["count"] for c in target["cells"]) == 13  # the two low bins
    assert sum(c["count"] for c in source["cells"]) == 19
    # source keeps its (now partly empty) piled grid
    labels = [s["label"] for s in source["hLabels"][0]["spans"]]
    assert labels[0] == "poor fuel economy"


def test_project_flow_with_piles_and_export(tmp_path):
    script = (
        "partition h origin\n"
        "select h US\n"
        "project stateside\n"
        "partition h cylinders\n"
    )
    result, out = run_cars(tmp_path, script)
    assert result.exit_code == 0, result.output
    layout2 = json.loads((out / "layout-2.json").read_text())
    assert layout2["substrateName"] == "stateside"
    total = sum(c["count"] for c in layout2["cells"])
    assert total == 14
    with open(out / "export-2.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 15  # header + the 14 US cars
    layout1 = json.loads((out / "layout-1.json").read_text())
    assert sum(c["count"] for c in layout1["cells"]) == 18


def test_failing_line_is_reported(tmp_path):
    result, _ = run_cars(tmp_path, "partition h cylinders\npartition h nope\n")
    assert result.exit_code != 0
    assert "script line 2" in result.output


def test_undo_after_each_op_restores_initial(tmp_path):
    plain, out_plain = run_cars(tmp_path, "")
    baseline = json.loads((out_plain / "layout-1.json").read_text())

    script = (
        "partition h cylinders\n"
        "undo\n"
        "partition v origin\n"
        "undo\n"
        "peek origin\n"
        "undo\n"
    )
    scripted = tmp_path / "s2"
    scripted.mkdir()
    script_file = scripted / "script.txt"
    script_file.write_text(script, encoding="utf-8")
    out = scripted / "out"
    result = invoke([
        "run", "--data", str(DATA / "cars.csv"),
        "--nominal", "cylinders", "--nominal", "year",
        "--script", str(script_file), "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    final = json.loads((out / "layout-1.json").read_text())
    assert final == baseline


def synth_trips(path, n=4000, seed=9):
    rng = random.Random(seed)
    boroughs = ["Manhattan", "Brooklyn", "Queens", "Bronx", "Staten Island"]
    years = [str(y) for y in range(2014, 2023)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "pu_borough", "do_borough", "fare"])
        for _ in range(n):
            writer.writerow([
                rng.choice(years),
                rng.choices(boroughs, weights=[60, 15, 15, 7, 3])[0],
                rng.choices(boroughs, weights=[60, 15, 15, 7, 3])[0],
                f"{rng.uniform(3, 80):.2f}",
            ])


def test_trip_drilldown_script(tmp_path):
    data = tmp_path / "trips.csv"
    synth_trips(data)
    script_file = tmp_path / "script.txt"
    script_file.write_text(
        "partition h year\n"
        "select h 2016 2017 2018 2019\n"
        "project pre-pandemic\n"
        "partition h pu_borough\n"
        "partition v do_borough\n",
        encoding="utf-8",
    )
    out = tmp_path / "out"
    result = invoke([
        "run", "--data", str(data), "--script", str(script_file), "--out", str(out),
        "--nominal", "year", "--sample", "2500", "--seed", "4",
    ])
    assert result.exit_code == 0, result.output

    main_layout = json.loads((out / "layout-1.json").read_text())
    drill = json.loads((out / "layout-2.json").read_text())
    assert drill["substrateName"] == "pre-pandemic"
    assert drill["nX"] == 5 and drill["nY"] == 5
    # conservation across substrates after sampling
    assert sum(c["count"] for c in main_layout["cells"]) + \
        sum(c["count"] for c in drill["cells"]) == 2500
    # projected substrate only holds the selected years
    log = json.loads((out / "session-log.json").read_text())
    assert [op["kind"] for op in log["ops"]] == [
        "pivot-partition", "project", "pivot-partition", "pivot-partition",
    ]
