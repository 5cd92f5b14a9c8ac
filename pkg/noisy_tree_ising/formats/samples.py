import io
from pathlib import Path
from typing import Union

import numpy as np

from ..exceptions import FormatError
from ..types import SampleBatch


def format_samples(batch: SampleBatch) -> str:
    """Header ``m n`` followed by one space-separated row of ±1 per sample."""
    buffer = io.StringIO()
    buffer.write(f"{batch.m} {batch.n}\n")
    np.savetxt(buffer, batch.values, fmt="%d", delimiter=" ")
    return buffer.getvalue()


def parse_samples(text: str) -> SampleBatch:
    head, _, body = text.lstrip().partition("\n")
    header = head.split()
    if len(header) != 2:
        raise FormatError(f"sample header must be 'm n', got {head!r}")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"sample header must be 'm n', got {head!r}") from None

    rows = [line.split() for line in body.splitlines() if line.strip()]
    if len(rows) != m:
        raise FormatError(f"header promises {m} samples, found {len(rows)}")
    for k, row in enumerate(rows, start=2):
        if len(row) != n:
            raise FormatError(f"line {k}: expected {n} entries, got {len(row)}")
    try:
        values = np.array(rows, dtype=np.int64).reshape(m, n)
    except ValueError:
        raise FormatError("sample entries must be integers") from None
    if values.size and not np.all((values == 1) | (values == -1)):
        raise FormatError("sample entries must be -1 or 1")
    return SampleBatch(values=values)


def read_samples(path: Union[str, Path]) -> SampleBatch:
    return parse_samples(Path(path).read_text(encoding="utf-8"))


def write_samples(path: Union[str, Path], batch: SampleBatch) -> None:
    Path(path).write_text(format_samples(batch), encoding="utf-8")
