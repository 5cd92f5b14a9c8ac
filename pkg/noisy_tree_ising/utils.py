import json
import logging
import time
from typing import TYPE_CHECKING, Iterable, Tuple

import numpy as np

if TYPE_CHECKING:
    from .types import MomentEstimate

logger = logging.getLogger(__name__)


def setup_logging(level: int = logging.INFO) -> None:
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler()],
    )


def log_moments(moments: "MomentEstimate") -> None:
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"Moments: source={moments.source.value} n={moments.n}")
        logger.debug(f"Mean: {json.dumps(np.round(moments.mean, 6).tolist())}")
        with np.printoptions(precision=4, suppress=True, linewidth=120):
            logger.debug(f"Covariance:\n{moments.cov}")


def log_edges(label: str, edges: Iterable[Tuple[int, int]]) -> None:
    if logger.isEnabledFor(logging.DEBUG):
        edge_list = [list(edge) for edge in edges]
        logger.debug(f"{label}: {json.dumps(edge_list)}")


def measure_time() -> float:
    return time.perf_counter()
