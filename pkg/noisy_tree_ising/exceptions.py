from typing import Optional, Sequence, Tuple


class TreeIsingError(Exception):
    def __init__(
        self,
        message: str,
        *,
        node: Optional[int] = None,
        nodes: Optional[Sequence[int]] = None,
    ) -> None:
        super().__init__(message)
        self.node = node
        self.nodes: Optional[Tuple[int, ...]] = tuple(nodes) if nodes is not None else None


class InvalidTreeError(TreeIsingError):
    pass


class InvalidParameterError(TreeIsingError):
    pass


class DimensionMismatchError(TreeIsingError):
    pass


class FormatError(TreeIsingError):
    pass


class DegenerateColumnError(TreeIsingError):
    pass


class InfeasibleNoiseError(TreeIsingError):
    pass


class InvalidConfigurationError(TreeIsingError):
    pass


class ConstructionError(TreeIsingError):
    pass


class DegenerateQuadError(TreeIsingError):
    pass


class AmbiguousQuadError(TreeIsingError):
    pass


class LearnerError(TreeIsingError):
    pass


class EnumerationCapError(TreeIsingError):
    pass


class OracleSizeError(TreeIsingError):
    pass


def exit_code_for(error: BaseException) -> int:
    """Map an exception raised by the library to a CLI exit status."""
    if isinstance(
        error,
        (FormatError, InvalidParameterError, InvalidTreeError, DimensionMismatchError),
    ):
        return 2
    if isinstance(error, (LearnerError, AmbiguousQuadError, DegenerateQuadError)):
        return 3
    if isinstance(error, (OracleSizeError, EnumerationCapError)):
        return 4
    return 1
