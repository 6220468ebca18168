"""CSV ingestion, results serialization, and run manifests.

Numeric cells are parsed strictly (no silent coercion): ragged rows,
non-numeric or missing values, and non-finite entries are errors naming the
offending row and column.  Floats are written with 17 significant digits so
written tables parse back to full precision.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset

RESULTS_COLUMNS = ("method", "replicate", "sse", "mse",
                   "lambda0", "lambda1", "iterations", "converged")


@dataclass(frozen=True)
class ResultRow:
    """One results line; None fields serialize as NA.

    ``replicate`` is an integer for per-replicate rows and the strings
    "mean"/"stderr" for aggregate rows.
    """

    method: str
    replicate: object
    sse: float = None
    mse: float = None
    lambda0: float = None
    lambda1: float = None
    iterations: int = None
    converged: bool = None


@dataclass
class ResultsTable:
    rows: list = field(default_factory=list)


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not np.isfinite(value):
            return "NA"
        return format(value, ".17g")
    return str(value)


def write_results(table: ResultsTable, path) -> None:
    """Write the fixed-header results CSV."""
    path = Path(path)
    lines = [",".join(RESULTS_COLUMNS)]
    for row in table.rows:
        lines.append(",".join(_fmt(getattr(row, col)) for col in RESULTS_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _parse_optional_float(cell):
    return None if cell == "NA" else float(cell)


def read_results(path) -> ResultsTable:
    """Parse a results CSV back; inverse of :func:`write_results`."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != ",".join(RESULTS_COLUMNS):
        raise ValueError(f"{path} is not a results table (unexpected header)")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(RESULTS_COLUMNS):
            raise ValueError(f"ragged results row: {line!r}")
        replicate = cells[1] if cells[1] in ("mean", "stderr") else int(cells[1])
        converged = None if cells[7] == "NA" else cells[7] == "true"
        iterations = None if cells[6] == "NA" else int(cells[6])
        rows.append(ResultRow(
            method=cells[0], replicate=replicate,
            sse=_parse_optional_float(cells[2]), mse=_parse_optional_float(cells[3]),
            lambda0=_parse_optional_float(cells[4]), lambda1=_parse_optional_float(cells[5]),
            iterations=iterations, converged=converged,
        ))
    return ResultsTable(rows=rows)


def load_csv(path, response_column: str = None, domain_tag: str = "target") -> Dataset:
    """Read a headered numeric CSV into a Dataset.

    The response is the named column, or the last column by default; the
    remaining columns form the design in file order.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if response_column is None:
            response_idx = len(header) - 1
        else:
            if response_column not in header:
                raise ValueError(
                    f"response column {response_column!r} not found in {path} "
                    f"(columns: {', '.join(header)})"
                )
            response_idx = header.index(response_column)
        rows = []
        for r, cells in enumerate(reader, start=1):
            if len(cells) != len(header):
                raise ValueError(
                    f"ragged row {r} in {path}: expected {len(header)} cells, "
                    f"got {len(cells)}"
                )
            parsed = []
            for c, cell in enumerate(cells):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(
                        f"non-numeric cell at row {r}, column {header[c]!r} in {path}: {cell!r}"
                    ) from None
                if not np.isfinite(value):
                    raise ValueError(
                        f"non-finite value at row {r}, column {header[c]!r} in {path}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path} has a header but no data rows")
    data = np.asarray(rows, dtype=float)
    design = np.delete(data, response_idx, axis=1)
    return Dataset(design=design, response=data[:, response_idx], domain_tag=domain_tag)


def write_dataset_csv(ds: Dataset, path, response_name: str = "y") -> None:
    """Write a Dataset as a headered CSV, response last; inverse of load_csv."""
    path = Path(path)
    header = [f"x{j + 1}" for j in range(ds.dim)] + [response_name]
    lines = [",".join(header)]
    for i in range(ds.n):
        cells = [_fmt(float(v)) for v in ds.design[i]] + [_fmt(float(ds.response[i]))]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_vector_csv(values, path, value_name: str = "value") -> None:
    """Write a coefficient vector with 1-based indices."""
    lines = [f"index,{value_name}"]
    for j, v in enumerate(np.asarray(values, dtype=float), start=1):
        lines.append(f"{j},{_fmt(float(v))}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_vector_csv(path) -> np.ndarray:
    """Read a coefficient vector written by :func:`write_vector_csv`."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    return np.array([float(line.split(",")[1]) for line in lines[1:]])


def write_matrix_csv(matrix, path, row_prefix: str = "t", col_prefix: str = "s") -> None:
    """Write a matrix with 1-based row/column labels."""
    matrix = np.asarray(matrix, dtype=float)
    header = [""] + [f"{col_prefix}{l + 1}" for l in range(matrix.shape[1])]
    lines = [",".join(header)]
    for j in range(matrix.shape[0]):
        cells = [f"{row_prefix}{j + 1}"] + [_fmt(float(v)) for v in matrix[j]]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(config: dict, path) -> None:
    """Persist the resolved run configuration as flat key = value lines."""
    lines = [f"{key} = {config[key]}" for key in sorted(config) if config[key] is not None]
    Path(path).write_text("\n".join(lines) + "\n")


def read_config_file(path) -> dict:
    """Parse a flat key = value config file; # starts a comment line."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line {lineno} in {path}: {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
