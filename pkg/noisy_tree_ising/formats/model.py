import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from ..exceptions import FormatError
from ..types import IsingModel, NoiseSpec, TreeGraph

logger = logging.getLogger(__name__)


def _lines(text: str) -> List[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def _float(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise FormatError(f"{where}: {token!r} is not a number") from None


def _int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"{where}: {token!r} is not an integer") from None


def format_model(model: IsingModel, noise: Optional[NoiseSpec] = None) -> str:
    """
    Serialise a model as text: ``n``, then ``u v w`` per edge, then one bias per
    line, then optionally one flip probability per line.

    Floats are written with ``repr`` so reading the text back is exact.
    """
    lines = [str(model.n)]
    lines.extend(f"{u} {v} {w!r}" for (u, v), w in zip(model.tree.edges, model.weights))
    lines.extend(repr(b) for b in model.biases)
    if noise is not None:
        if noise.n != model.n:
            raise FormatError(f"noise covers {noise.n} nodes, model has {model.n}")
        lines.extend(repr(q) for q in noise.q)
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> Tuple[IsingModel, Optional[NoiseSpec]]:
    """
    Parse the model text format.

    Raises:
        FormatError: wrong line count or a malformed entry.
        InvalidTreeError: the edges do not form a spanning tree.
    """
    lines = _lines(text)
    if not lines:
        raise FormatError("model file is empty")
    header = lines[0].split()
    if len(header) != 1:
        raise FormatError(f"line 1: expected the node count, got {lines[0]!r}")
    n = _int(header[0], "line 1")
    if n < 2:
        raise FormatError(f"line 1: node count must be at least 2, got {n}")

    expected = 1 + (n - 1) + n
    if len(lines) not in (expected, expected + n):
        raise FormatError(
            f"expected {expected} or {expected + n} non-blank lines for n={n}, got {len(lines)}"
        )

    edges = []
    weights = []
    for k, line in enumerate(lines[1:n], start=2):
        fields = line.split()
        if len(fields) != 3:
            raise FormatError(f"line {k}: expected 'u v w', got {line!r}")
        edges.append((_int(fields[0], f"line {k}"), _int(fields[1], f"line {k}")))
        weights.append(_float(fields[2], f"line {k}"))

    def column(block: List[str], offset: int) -> List[float]:
        values = []
        for k, line in enumerate(block, start=offset):
            fields = line.split()
            if len(fields) != 1:
                raise FormatError(f"line {k}: expected a single value, got {line!r}")
            values.append(_float(fields[0], f"line {k}"))
        return values

    biases = column(lines[n : 2 * n], n + 1)
    model = IsingModel(tree=TreeGraph(n=n, edges=tuple(edges)), weights=tuple(weights), biases=tuple(biases))

    noise = None
    if len(lines) == expected + n:
        noise = NoiseSpec(q=tuple(column(lines[2 * n :], 2 * n + 1)))
    return model, noise


def read_model(path: Union[str, Path]) -> Tuple[IsingModel, Optional[NoiseSpec]]:
    text = Path(path).read_text(encoding="utf-8")
    logger.debug(f"Read model file {path}")
    return parse_model(text)


def write_model(path: Union[str, Path], model: IsingModel, noise: Optional[NoiseSpec] = None) -> None:
    Path(path).write_text(format_model(model, noise), encoding="utf-8")
