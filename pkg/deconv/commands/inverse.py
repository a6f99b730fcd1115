import json

import typer
from rich.table import Table

from deconv.commands.common import console, fail, parse_params
from deconv.models.scenario import DistributionSpec
from deconv.services.distribution_service import DistributionService
from deconv.services.inverse_seq import InverseSeqService
from deconv.utils.helper import NumpyEncoder


def gamma(
    family: str = typer.Option(..., "--family", help="Lattice noise family"),
    params: str = typer.Option("", "--params", help="k=v pairs, e.g. 'lam=1.5'"),
    zmax: int = typer.Option(20, "--zmax", min=0, help="Last index to print"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON list instead of a table"),
):
    """Print the inverse sequence γ of the normalised noise pmf"""
    try:
        spec = DistributionSpec(family=family, params=parse_params(params))
        noise = DistributionService.lattice_noise(spec)
        values = InverseSeqService.gamma_for_noise(noise, zmax).values.real
    except ValueError as e:
        raise fail(e)

    if as_json:
        console.print_json(json.dumps(values, cls=NumpyEncoder))
        return
    table = Table(title=f"γ for {family} {params}".strip())
    table.add_column("z", justify="right")
    table.add_column("γ(z)", justify="right")
    for z, value in enumerate(values):
        table.add_row(str(z), f"{value:.12g}")
    console.print(table)
