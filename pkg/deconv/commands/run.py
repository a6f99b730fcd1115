import logging
from pathlib import Path
from typing import List, Optional

import typer
import yaml
from rich.table import Table

from deconv.commands.common import console, fail
from deconv.core.exceptions import DeconvError, ExportError
from deconv.services.export_service import ExportService
from deconv.services.scenario_store import ScenarioStore
from deconv.services.simulation_service import SimulationService

logger = logging.getLogger(__name__)


def run(
    scenario: Path = typer.Option(..., "--scenario", "-s", help="Scenario YAML file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the result frame here"),
    fmt: Optional[str] = typer.Option(None, "--format", "-f", help="csv or json; defaults to the --out suffix"),
    override: List[str] = typer.Option([], "--override", help="key.path=value, repeatable"),
):
    """Run a scenario and report the estimator curve"""
    try:
        loaded = ScenarioStore.load(scenario, override)
        frame = SimulationService.run_scenario(loaded)
        if out is not None:
            ExportService.export(frame, out, fmt)
    except (DeconvError, yaml.YAMLError) as e:
        raise fail(e)
    except OSError as e:
        raise fail(ExportError(f"cannot complete the run: {e}"))

    table = Table(title=f"{frame.scenario} ({frame.estimator}, {frame.replications} replications)")
    for column in ("xi", "F_X", "F_Y", "mean", "sd"):
        table.add_column(column, justify="right")
    for row in frame.rows:
        table.add_row(
            f"{row.xi:.4g}",
            "" if row.fx_true is None else f"{row.fx_true:.6f}",
            "" if row.fy_true is None else f"{row.fy_true:.6f}",
            f"{row.est_mean:.6f}",
            f"{row.est_sd:.6f}",
        )
    console.print(table)
    if out is not None:
        console.print(f"wrote {out}")
