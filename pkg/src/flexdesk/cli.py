"""Command-line entry points: serve the API, move data in and out, refit models."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path
from typing import Optional

import click

from .config import load_config
from .feedback import Dimension
from .service import ServiceCore, seed_scenario
from .simgen import generate, load_spec
from .telemetry import reading_to_dict
from .timeutil import iso


def _core(config_path: Optional[str]) -> ServiceCore:
    config = load_config(config_path)
    core = ServiceCore(config, data_dir=Path(config.data_dir))
    if config.catalog_seed and not core.catalog.zones():
        seed = json.loads(Path(config.catalog_seed).read_text())
        core.load_catalog_seed(seed)
    return core


@click.group()
def main():
    """Desk allocation by comfort preference."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(config_path, host, port):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app

    core = _core(config_path)
    uvicorn.run(create_app(core), host=host, port=port)


@main.command("import-readings")
@click.argument("csv_file", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def import_readings(csv_file, config_path):
    """Bulk-load sensor readings from CSV."""
    core = _core(config_path)
    with open(csv_file, newline="") as fp:
        accepted, quarantined = 0, 0
        reader = csv.DictReader(fp)
        from .telemetry import reading_from_dict

        for row in reader:
            result = core.ingest_reading(reading_from_dict(row))
            if result.accepted:
                accepted += 1
            else:
                quarantined += 1
    click.echo(f"accepted {accepted}, quarantined {quarantined}")


@main.command("export-feedback")
@click.argument("out_file", type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def export_feedback(out_file, config_path):
    """Write the enriched feedback CSV."""
    core = _core(config_path)
    with open(out_file, "w", newline="") as fp:
        count = core.feedback.export_csv(fp)
    click.echo(f"wrote {count} feedback rows to {out_file}")


@main.command("recompute-profiles")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def recompute_profiles(config_path):
    """Refit all comfort-type models and the match matrix."""
    core = _core(config_path)
    fitted = core.recompute_profiles()
    for dimension, (model, build) in fitted.items():
        click.echo(
            f"{dimension.value}: k={model.k}, {len(model.assignments)} occupants profiled, "
            f"{len(build.excluded)} under threshold"
        )
    matrix = core.recompute_matrix()
    click.echo(f"matrix: {len(matrix.zone_ids)} zones x {len(matrix.labels)} comfort types")


@main.group()
def profile():
    """Model maintenance."""


@profile.command("recompute")
@click.option("--dimension", type=click.Choice([d.value for d in Dimension]), required=True)
@click.option("--k", type=int, default=None, help="Pin the cluster count.")
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def profile_recompute(dimension, k, seed, config_path):
    """Refit one dimension's comfort-type model."""
    core = _core(config_path)
    if seed is not None:
        from dataclasses import replace

        core.config = replace(core.config, seed=seed)
    fitted = core.recompute_profiles(dimensions=[Dimension(dimension)], k_override=k)
    for dim, (model, _) in fitted.items():
        labels = {i: lbl.value for i, lbl in sorted(model.labels.items())}
        click.echo(f"{dim.value}: k={model.k}, inertia={model.inertia:.4f}, labels={labels}")


@main.command("print-match-matrix")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def print_match_matrix(config_path, fmt):
    """Print the published match matrix."""
    core = _core(config_path)
    if core.matrix is None:
        raise click.ClickException("no match matrix published; run recompute-profiles first")
    if fmt == "json":
        click.echo(json.dumps(core.matrix.to_dict(), indent=2, sort_keys=True))
    else:
        writer = csv.writer(sys.stdout)
        for row in core.matrix.to_csv_rows():
            writer.writerow(row)


@main.command("simgen")
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def simgen_cmd(spec_path, out_dir):
    """Generate a synthetic scenario: telemetry CSV, feedback CSV, ground truth."""
    scenario = generate(load_spec(spec_path))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "readings.csv", "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(
            ["zone_id", "timestamp", "temp_c", "rh_pct", "noise_db", "lux", "co2_ppm", "tvoc_ppb", "presence"]
        )
        for r in scenario.readings:
            d = reading_to_dict(r)
            writer.writerow(
                [d["zone_id"], d["timestamp"], d["temp_c"], d["rh_pct"], d["noise_db"],
                 d["lux"], d["co2_ppm"], d["tvoc_ppb"], d["presence"]]
            )

    # enrichment columns stay empty here: the service fills them on export
    with open(out / "feedback.csv", "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(
            ["feedback_id", "occupant_id", "zone_id", "desk_id", "timestamp",
             "thermal", "visual", "aural", "temp_c", "lux", "noise_db", "enrichment_delta_s"]
        )
        for fb in scenario.feedback:
            writer.writerow(
                [fb.feedback_id, fb.occupant_id, fb.zone_id, fb.desk_id, iso(fb.timestamp),
                 fb.votes[Dimension.THERMAL].value, fb.votes[Dimension.VISUAL].value,
                 fb.votes[Dimension.AURAL].value, "", "", "", ""]
            )

    catalog = {
        "zones": [
            {"zone_id": z.zone_id, "building": z.building, "floor": z.floor, "name": z.name,
             "sensor_id": z.sensor_id, "desk_ids": list(z.desk_ids)}
            for z in scenario.zones
        ],
        "desks": [
            {"desk_id": d.desk_id, "zone_id": d.zone_id, "label": d.label, "qr_token": d.qr_token}
            for d in scenario.desks
        ],
    }
    (out / "catalog.json").write_text(json.dumps(catalog, indent=2))
    truth = {
        "type_by_occupant": dict(sorted(scenario.ground_truth.type_by_occupant.items())),
        "hard_to_predict": sorted(scenario.ground_truth.hard_to_predict),
    }
    (out / "ground_truth.json").write_text(json.dumps(truth, indent=2))
    click.echo(
        f"generated {len(scenario.readings)} readings, {len(scenario.reservations)} sessions, "
        f"{len(scenario.feedback)} feedback points in {out}"
    )


@main.command("seed-scenario")
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--recompute/--no-recompute", default=True, show_default=True)
def seed_scenario_cmd(spec_path, config_path, recompute):
    """Generate a scenario and replay it through a service state directory."""
    core = _core(config_path)
    scenario = generate(load_spec(spec_path))
    counts = seed_scenario(core, scenario)
    click.echo(f"seeded: {counts}")
    if recompute:
        core.recompute_profiles()
        horizon_end = max(r.timestamp for r in scenario.readings)
        matrix = core.recompute_matrix(now=horizon_end)
        click.echo(f"matrix over window ending {iso(horizon_end)}: {len(matrix.zone_ids)} zones")


if __name__ == "__main__":
    main()
