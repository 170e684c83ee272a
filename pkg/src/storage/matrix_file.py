"""Matrix files, verification reports and sweep tables on disk.

Matrix files are JSON objects with a version tag and separate real and
imaginary arrays. Floats are written in shortest round-trip form, so a
save/load cycle reproduces every double exactly.
"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.bounds.models import DecayModel, Empirical
from src.config import settings
from src.errors import MatrixFileError
from src.linalg.core import ComplexMatrix, as_matrix
from src.verify.reports import SweepTable

logger = logging.getLogger(__name__)

FORMAT_VERSION = "schatten-matrix/1"
SWEEP_COLUMNS = ["N", "truncation_term", "tail_term", "bound", "true_error"]

PathLike = Union[str, Path]


def _fmt(x: float) -> str:
    return repr(float(x))


class MatrixMetadata(BaseModel):
    name: Optional[str] = None
    model: Optional[DecayModel] = None
    seed: Optional[int] = None
    basis_seed: Optional[int] = None


class MatrixFile(BaseModel):
    format: str
    dim: int = Field(ge=1)
    real: list[list[float]]
    imag: list[list[float]]
    metadata: MatrixMetadata = Field(default_factory=MatrixMetadata)

    @model_validator(mode="after")
    def _check_layout(self) -> "MatrixFile":
        if self.format != FORMAT_VERSION:
            raise ValueError(f"unrecognized format tag {self.format!r}")
        for name, rows in (("real", self.real), ("imag", self.imag)):
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"{name} array must be {self.dim}x{self.dim}")
            if not all(math.isfinite(x) for row in rows for x in row):
                raise ValueError(f"{name} array has non-finite values")
        return self

    @classmethod
    def from_matrix(cls, M, metadata: Optional[MatrixMetadata] = None) -> "MatrixFile":
        M = as_matrix(M)
        return cls(
            format=FORMAT_VERSION,
            dim=M.shape[0],
            real=M.real.tolist(),
            imag=M.imag.tolist(),
            metadata=metadata or MatrixMetadata(),
        )

    def to_matrix(self) -> ComplexMatrix:
        return np.asarray(self.real, dtype=np.float64) + 1j * np.asarray(self.imag, dtype=np.float64)


class MatrixStore:
    """Reads and writes every file the command line produces or consumes."""

    def __init__(self, output_dir: Optional[Path] = None):
        self._output_dir = output_dir

    @property
    def output_dir(self) -> Path:
        return self._output_dir if self._output_dir is not None else settings.output_dir

    def default_path(self, filename: str) -> Path:
        return self.output_dir / filename

    def _read_text(self, path: PathLike) -> str:
        path = Path(path)
        logger.info(f"[IO] reading {path}")
        try:
            return path.read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise MatrixFileError(f"{path}: not valid UTF-8 (byte {e.start})") from e

    def _write_text(self, path: PathLike, text: str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        logger.info(f"[IO] wrote {path}")
        return path

    def load_matrix_file(self, path: PathLike) -> MatrixFile:
        text = self._read_text(path)
        try:
            return MatrixFile.model_validate_json(text)
        except ValidationError as e:
            raise MatrixFileError(f"{path}: {e.errors()[0]['msg']}") from e

    def load_matrix(self, path: PathLike) -> ComplexMatrix:
        return self.load_matrix_file(path).to_matrix()

    def save_matrix(self, path: PathLike, M, metadata: Optional[MatrixMetadata] = None) -> Path:
        return self._write_text(path, MatrixFile.from_matrix(M, metadata).model_dump_json(indent=2) + "\n")

    def load_moduli(self, path: PathLike) -> Empirical:
        """Empirical decay model from a JSON list of moduli or an object with a "moduli" key."""
        text = self._read_text(path)
        try:
            data = json.loads(text)
            if isinstance(data, list):
                data = {"moduli": data}
            return Empirical.model_validate(data)
        except (json.JSONDecodeError, ValidationError) as e:
            raise MatrixFileError(f"{path}: {e}") from e

    def write_json(self, path: PathLike, payload: BaseModel) -> Path:
        return self._write_text(path, payload.model_dump_json(indent=2) + "\n")

    def sweep_csv(self, table: SweepTable) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow([table.swept_name, *SWEEP_COLUMNS])
        for row in table.rows:
            writer.writerow([
                _fmt(row.swept),
                row.N,
                _fmt(row.truncation_term),
                _fmt(row.tail_term),
                _fmt(row.bound),
                "" if row.true_error is None else _fmt(row.true_error),
            ])
        return buffer.getvalue()

    def write_sweep(self, path: PathLike, table: SweepTable) -> Path:
        return self._write_text(path, self.sweep_csv(table))


store = MatrixStore()
