import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import yaml
from pydantic import ValidationError

from deconv.core.exceptions import ScenarioError
from deconv.models.scenario import Scenario

logger = logging.getLogger(__name__)


class ScenarioStore:
    """Reads scenario files and applies dotted command-line overrides"""

    @staticmethod
    def apply_override(data: Dict[str, Any], override: str) -> Dict[str, Any]:
        """Set data[a][b]... from 'a.b=value'; the value is parsed as YAML"""
        if "=" not in override:
            raise ScenarioError(f"override '{override}' is not of the form key=value")
        key, raw = override.split("=", 1)
        path = [part for part in key.strip().split(".") if part]
        if not path:
            raise ScenarioError(f"override '{override}' names no field")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ScenarioError(f"override '{override}' has an unreadable value: {e}")
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ScenarioError(f"override '{override}': '{part}' is not a mapping")
            node = child
        node[path[-1]] = value
        return data

    @staticmethod
    def from_dict(data: Dict[str, Any], overrides: Iterable[str] = ()) -> Scenario:
        for override in overrides:
            ScenarioStore.apply_override(data, override)
        try:
            return Scenario.model_validate(data)
        except ValidationError as e:
            messages = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'scenario'}: {err['msg']}" for err in e.errors()
            )
            raise ScenarioError(f"invalid scenario: {messages}")

    @staticmethod
    def load(path: Union[str, Path], overrides: Iterable[str] = ()) -> Scenario:
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as e:
            logger.error(f"Cannot read scenario {path}: {e}")
            raise ScenarioError(f"cannot read scenario {path}: {e}")
        except yaml.YAMLError as e:
            raise ScenarioError(f"scenario {path} is not valid YAML: {e}")
        if not isinstance(data, dict):
            raise ScenarioError(f"scenario {path} must be a mapping")
        data.setdefault("name", path.stem)
        scenario = ScenarioStore.from_dict(data, overrides)
        logger.info(f"Loaded scenario {scenario.name} from {path}")
        return scenario
