from .edges import edges_to_tree, format_edges, parse_edges, read_edges, write_edges
from .model import format_model, parse_model, read_model, write_model
from .samples import format_samples, parse_samples, read_samples, write_samples

__all__ = [
    "edges_to_tree",
    "format_edges",
    "format_model",
    "format_samples",
    "parse_edges",
    "parse_model",
    "parse_samples",
    "read_edges",
    "read_model",
    "read_samples",
    "write_edges",
    "write_model",
    "write_samples",
]
