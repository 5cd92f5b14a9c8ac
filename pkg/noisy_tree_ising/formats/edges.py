from pathlib import Path
from typing import Iterable, List, Optional, Union

from ..exceptions import FormatError
from ..types import Edge, TreeGraph


def format_edges(edges: Iterable[Edge]) -> str:
    """One ``u v`` line per edge, u < v, in ascending lexicographic order."""
    ordered = sorted((min(u, v), max(u, v)) for u, v in edges)
    return "".join(f"{u} {v}\n" for u, v in ordered)


def parse_edges(text: str) -> List[Edge]:
    edges: List[Edge] = []
    for k, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 2:
            raise FormatError(f"line {k}: expected 'u v', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(f"line {k}: node labels must be integers, got {line!r}") from None
        edges.append((u, v))
    return edges


def edges_to_tree(edges: Iterable[Edge], n: Optional[int] = None) -> TreeGraph:
    """Build a TreeGraph, raising InvalidTreeError when the edges are not a spanning tree."""
    edges = list(edges)
    if n is None:
        return TreeGraph.from_edges(edges)
    return TreeGraph(n=n, edges=tuple(edges))


def read_edges(path: Union[str, Path], n: Optional[int] = None) -> TreeGraph:
    return edges_to_tree(parse_edges(Path(path).read_text(encoding="utf-8")), n)


def write_edges(path: Union[str, Path], edges: Iterable[Edge]) -> None:
    Path(path).write_text(format_edges(edges), encoding="utf-8")
