import csv
import json

from click.testing import CliRunner

from flexdesk.cli import main
from flexdesk.simgen import desk_scale_spec


def write_config(tmp_path, **overrides):
    config = {"data_dir": str(tmp_path / "data"), "seed": 42}
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return str(path)


def write_spec(tmp_path, seed=7):
    from flexdesk.simgen import spec_to_dict

    spec = desk_scale_spec(seed=seed)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(spec_to_dict(spec)))
    return str(path)


def test_simgen_emits_csvs_and_truth(tmp_path):
    runner = CliRunner()
    spec_path = write_spec(tmp_path)
    out_dir = tmp_path / "out"
    result = runner.invoke(main, ["simgen", "--spec", spec_path, "--out", str(out_dir)])
    assert result.exit_code == 0, result.output
    with open(out_dir / "readings.csv") as fp:
        header = next(csv.reader(fp))
    assert header == ["zone_id", "timestamp", "temp_c", "rh_pct", "noise_db", "lux",
                      "co2_ppm", "tvoc_ppb", "presence"]
    with open(out_dir / "feedback.csv") as fp:
        header = next(csv.reader(fp))
    assert header[:5] == ["feedback_id", "occupant_id", "zone_id", "desk_id", "timestamp"]
    truth = json.loads((out_dir / "ground_truth.json").read_text())
    assert len(truth["type_by_occupant"]) == 25


def test_import_readings_roundtrip(tmp_path):
    runner = CliRunner()
    spec_path = write_spec(tmp_path)
    out_dir = tmp_path / "out"
    assert runner.invoke(main, ["simgen", "--spec", spec_path, "--out", str(out_dir)]).exit_code == 0

    config = write_config(tmp_path, catalog_seed=str(out_dir / "catalog.json"))
    result = runner.invoke(
        main, ["import-readings", str(out_dir / "readings.csv"), "--config", config]
    )
    assert result.exit_code == 0, result.output
    assert "quarantined 0" in result.output


def test_seed_recompute_print_and_export(tmp_path):
    runner = CliRunner()
    spec_path = write_spec(tmp_path)
    config = write_config(tmp_path)

    seeded = runner.invoke(
        main, ["seed-scenario", "--spec", spec_path, "--config", config]
    )
    assert seeded.exit_code == 0, seeded.output
    assert "matrix over window" in seeded.output

    printed = runner.invoke(main, ["print-match-matrix", "--config", config])
    assert printed.exit_code == 0, printed.output
    rows = list(csv.reader(printed.output.strip().splitlines()))
    assert rows[0] == ["zone_id", "cluster_label", "dimension", "level", "overall"]
    assert len(rows) == 1 + 6 * 4 * 3

    printed_json = runner.invoke(main, ["print-match-matrix", "--config", config, "--format", "json"])
    assert printed_json.exit_code == 0
    assert len(json.loads(printed_json.output)["zones"]) == 6

    exported = runner.invoke(
        main, ["export-feedback", str(tmp_path / "feedback-out.csv"), "--config", config]
    )
    assert exported.exit_code == 0, exported.output
    with open(tmp_path / "feedback-out.csv") as fp:
        rows = list(csv.reader(fp))
    assert len(rows) > 1000
    # every row enriched: sensor columns populated
    assert all(row[8] != "" for row in rows[1:])


def test_profile_recompute_subcommand(tmp_path):
    runner = CliRunner()
    spec_path = write_spec(tmp_path)
    config = write_config(tmp_path)
    assert runner.invoke(
        main, ["seed-scenario", "--spec", spec_path, "--config", config, "--no-recompute"]
    ).exit_code == 0
    result = runner.invoke(
        main,
        ["profile", "recompute", "--dimension", "thermal", "--k", "4", "--seed", "42",
         "--config", config],
    )
    assert result.exit_code == 0, result.output
    assert "thermal: k=4" in result.output
