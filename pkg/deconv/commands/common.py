import logging
import re
from typing import Any, Dict, Tuple

import typer
import yaml
from pydantic import ValidationError
from rich.console import Console

from deconv.core.exceptions import DeconvError, ScenarioError
from deconv.models.measures import DiracAt, SignedMixture
from deconv.models.scenario import DistributionSpec

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

# key=value pairs; bracketed values may contain commas
_PAIR = re.compile(r"\s*(\w+)\s*=\s*(\[[^\]]*\]|[^,]+)\s*(?:,|$)")


def fail(e: Exception) -> typer.Exit:
    """Report an error and return the Exit carrying its code"""
    if isinstance(e, DeconvError):
        code = e.exit_code
    elif isinstance(e, (ValidationError, yaml.YAMLError)):
        code = 2
    else:
        code = 1
    logger.error(f"{type(e).__name__}: {e}")
    err_console.print(f"[bold red]error:[/bold red] {e}")
    return typer.Exit(code=code)


def parse_params(text: str) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    if not text or not text.strip():
        return params
    pos = 0
    while pos < len(text):
        match = _PAIR.match(text, pos)
        if match is None:
            raise ScenarioError(f"cannot parse parameters '{text}' near '{text[pos:]}'")
        params[match.group(1)] = yaml.safe_load(match.group(2).strip())
        pos = match.end()
    return params


def parse_distribution(text: str) -> DistributionSpec:
    """'family:k=v,...' as a distribution spec"""
    family, _, rest = text.partition(":")
    try:
        return DistributionSpec(family=family.strip(), params=parse_params(rest))
    except ValidationError as e:
        raise ScenarioError(f"invalid distribution '{text}': {e.errors()[0]['msg']}")


def parse_atoms(text: str) -> SignedMixture:
    """'c@x,c@x,...' as an atomic measure"""
    pairs: Tuple = ()
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        coeff, sep, loc = chunk.partition("@")
        if not sep:
            raise ScenarioError(f"atom '{chunk}' is not of the form coeff@location")
        try:
            pairs += ((float(coeff), float(loc)),)
        except ValueError:
            raise ScenarioError(f"atom '{chunk}' has a non-numeric part")
    if not pairs:
        raise ScenarioError("no atoms given")
    return SignedMixture.from_terms((c, DiracAt(location=x)) for c, x in pairs).merged()
