from deconv.main import cli

cli()
