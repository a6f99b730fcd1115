import logging

import typer

from deconv.core.config import settings

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

# Import command modules
from deconv.commands.inverse import gamma  # noqa: E402
from deconv.commands.operator import check_invertibility  # noqa: E402
from deconv.commands.run import run  # noqa: E402
from deconv.commands.schema import schema  # noqa: E402

# Create CLI app
app = typer.Typer(
    name=settings.APP_NAME,
    help="Transform-free deconvolution of distribution functions",
    no_args_is_help=True,
    add_completion=False,
)

# Register commands
app.command("run")(run)
app.command("gamma")(gamma)
app.command("check-invertibility")(check_invertibility)
app.command("schema")(schema)


def _print_version(value: bool):
    if value:
        typer.echo(f"{settings.APP_NAME} {settings.VERSION}")
        raise typer.Exit()


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
    version: bool = typer.Option(
        False, "--version", callback=_print_version, is_eager=True, help="Print the version and exit"
    ),
):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def cli():
    app()


if __name__ == "__main__":
    cli()
