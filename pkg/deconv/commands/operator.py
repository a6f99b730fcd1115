import typer
from rich.table import Table

from deconv.commands.common import console, fail, parse_atoms, parse_distribution
from deconv.services.distribution_service import DistributionService
from deconv.services.operator_analysis import OperatorAnalysisService


def check_invertibility(
    eta: str = typer.Option(..., "--eta", help="Atoms of η as 'coeff@location,...'"),
    noise: str = typer.Option(..., "--noise", help="Noise law as 'family:k=v,...'"),
):
    """Report ||π_{η*μ_ε}||_TV and the sufficient invertibility condition"""
    try:
        measure = parse_atoms(eta)
        model = DistributionService.noise_model(parse_distribution(noise))
        report = OperatorAnalysisService.tv_of_pi(measure, model)
    except ValueError as e:
        raise fail(e)

    table = Table(title="operator T = I - π")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("total variation", f"{report.tv:.12g}")
    table.add_row("atom overlap (F_η*F_ε){0}", f"{report.atom_overlap:.12g}")
    table.add_row("η(R)", f"{report.eta_mass:.12g}")
    table.add_row("Jordan case", report.jordan_case.value)
    table.add_row("sufficient condition", "holds" if report.invertible_sufficient else "fails")
    console.print(table)
