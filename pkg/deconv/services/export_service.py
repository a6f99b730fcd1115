import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from deconv.core.exceptions import ExportError
from deconv.models.reports import ResultFrame, ResultRow
from deconv.utils.helper import NumpyEncoder, format_float, parse_float

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("xi", "fx_true", "fy_true", "est_mean", "est_sd")
FORMATS = ("csv", "json")


class ExportService:

    @staticmethod
    def resolve_format(path: Union[str, Path], fmt: Optional[str] = None) -> str:
        fmt = (fmt or Path(path).suffix.lstrip(".") or "csv").lower()
        if fmt not in FORMATS:
            raise ExportError(f"unsupported format '{fmt}', expected one of {', '.join(FORMATS)}")
        return fmt

    @staticmethod
    def to_csv(frame: ResultFrame) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in frame.rows:
            lines.append(",".join(format_float(getattr(row, col)) for col in CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    @staticmethod
    def to_json(frame: ResultFrame) -> str:
        return json.dumps(frame.model_dump(mode="python"), cls=NumpyEncoder, indent=2)

    @staticmethod
    def export(frame: ResultFrame, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
        path = Path(path)
        fmt = ExportService.resolve_format(path, fmt)
        text = ExportService.to_csv(frame) if fmt == "csv" else ExportService.to_json(frame)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            logger.error(f"Export to {path} failed: {e}")
            raise ExportError(f"cannot write {path}: {e}")
        logger.info(f"Wrote {len(frame.rows)} rows to {path} as {fmt}")
        return path

    @staticmethod
    def load(path: Union[str, Path], fmt: Optional[str] = None) -> ResultFrame:
        path = Path(path)
        fmt = ExportService.resolve_format(path, fmt)
        try:
            with path.open("r", encoding="utf-8", newline="") as fh:
                if fmt == "json":
                    return ResultFrame.model_validate(json.load(fh))
                reader = csv.DictReader(fh)
                if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                    raise ExportError(f"{path} does not carry the result header {','.join(CSV_COLUMNS)}")
                rows = [ResultRow(**{col: parse_float(rec[col]) for col in CSV_COLUMNS}) for rec in reader]
                return ResultFrame(rows=rows)
        except OSError as e:
            logger.error(f"Load from {path} failed: {e}")
            raise ExportError(f"cannot read {path}: {e}")
        except (ValueError, ValidationError) as e:
            if isinstance(e, ExportError):
                raise
            raise ExportError(f"{path} is not a valid result frame: {e}")

    @staticmethod
    def schema() -> Dict[str, Any]:
        """JSON schema of the exported result frame"""
        return ResultFrame.model_json_schema()
