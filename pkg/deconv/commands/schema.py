import json
from pathlib import Path
from typing import Optional

import typer

from deconv.commands.common import console, fail
from deconv.core.exceptions import ExportError
from deconv.services.export_service import ExportService


def schema(out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the schema to a file")):
    """Print the JSON schema of exported result frames"""
    text = json.dumps(ExportService.schema(), indent=2)
    if out is None:
        console.print_json(text)
        return
    try:
        out.write_text(text + "\n", encoding="utf-8")
    except OSError as e:
        raise fail(ExportError(f"cannot write {out}: {e}"))
    console.print(f"wrote {out}")
