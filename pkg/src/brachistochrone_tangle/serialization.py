"""
Plot-ready table files written by the command line interface.

Two formats carry the same content:

- ``csv``: ``# key: value`` metadata lines, a header row and one row per data point with numbers formatted to 12
  significant digits.
- ``json``: an object ``{"metadata": {...}, "columns": [...], "rows": [[...], ...]}``.

Both are byte-stable for a fixed input, which makes them usable in regression tests.
"""
import csv
import enum
import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, TextIO, Union

from pydantic import BaseModel, ConfigDict, model_validator

from brachistochrone_tangle.exceptions import InvalidInputError
from brachistochrone_tangle.utils import validate_that

logger = logging.getLogger(__name__)

Cell = Union[str, int, float, None]
MetadataValue = Union[str, int, float, bool, None]


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def format_number(value: Any) -> Cell:
    """
    Round floats to 12 significant digits and pass everything else through.
    Infinities and NaN become None so that both formats write an empty value for them.
    """
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.12g}")
    if isinstance(value, int) or value is None:
        return value
    return str(value)


class Table(BaseModel):
    """
    Rows of a data series together with the metadata needed to reproduce it
    """

    model_config = ConfigDict(frozen=True)

    metadata: Dict[str, MetadataValue]
    columns: List[str]
    rows: List[List[Cell]]

    @model_validator(mode="after")
    def _check_shape(self) -> "Table":
        for row in self.rows:
            validate_that(
                len(row) == len(self.columns),
                f"row {row!r} does not match the {len(self.columns)} columns",
            )
        return self

    @classmethod
    def build(
        cls,
        metadata: Dict[str, Any],
        columns: Sequence[str],
        rows: Sequence[Sequence[Any]],
    ) -> "Table":
        return cls(
            metadata={key: format_number(value) for key, value in metadata.items()},
            columns=list(columns),
            rows=[[format_number(cell) for cell in row] for row in rows],
        )

    def encode_csv(self) -> str:
        buffer = io.StringIO()
        for key, value in self.metadata.items():
            buffer.write(f"# {key}: {_cell_text(value)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell_text(cell) for cell in row])
        return buffer.getvalue()

    def encode_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    def encode(self, fmt: OutputFormat) -> str:
        if OutputFormat(fmt) == OutputFormat.CSV:
            return self.encode_csv()
        return self.encode_json()

    @classmethod
    def parse_csv(cls, text: str) -> "Table":
        """
        Parse a table from the csv format produced by :meth:`encode_csv`.
        Metadata values and cells are returned as numbers wherever they look like numbers.
        """
        metadata: Dict[str, MetadataValue] = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                metadata[key] = _parse_cell(value)
            elif line:
                body.append(line)
        records = list(csv.reader(body))
        if not records:
            raise InvalidInputError("table has no header row")
        return cls(
            metadata=metadata,
            columns=records[0],
            rows=[[_parse_cell(cell) for cell in record] for record in records[1:]],
        )

    @classmethod
    def parse(cls, text: str, fmt: OutputFormat) -> "Table":
        if OutputFormat(fmt) == OutputFormat.CSV:
            return cls.parse_csv(text)
        return cls.model_validate_json(text)


def _cell_text(value: MetadataValue) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _parse_cell(text: str) -> Cell:
    if text == "":
        return None
    for kind in (int, float):
        try:
            return kind(text)  # type: ignore[no-any-return]
        except ValueError:
            pass
    return text


def write_table(
    destination: Union[Path, str, TextIO], table: Table, fmt: OutputFormat
) -> None:
    """
    Write a table to a path or an open text stream.

    :raises OSError: If the path cannot be written.
    """
    text = table.encode(fmt)
    if isinstance(destination, (str, Path)):
        path = Path(destination)
        path.write_text(text, encoding="utf-8")
        logger.info("wrote %d rows to %s", len(table.rows), path)
    else:
        destination.write(text)
