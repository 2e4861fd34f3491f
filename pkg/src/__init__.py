import logging

import typer

from src.config import Config
from src.corpus.commands import fetch, stats, synthesize
from src.evaluation.commands import benchmark, report

version = "v1"

app = typer.Typer(
    name="screenbench",
    help="Benchmark citation-screening classifiers by work saved over sampling.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main(
    log_level: str = typer.Option(Config.LOG_LEVEL, "--log-level", help="Python logging level"),
) -> None:
    logging.basicConfig(
        level=log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


app.command(name="fetch")(fetch)
app.command(name="stats")(stats)
app.command(name="synthesize")(synthesize)
app.command(name="benchmark")(benchmark)
app.command(name="report")(report)
