import logging

import numpy as np

from .exceptions import DegenerateColumnError, InvalidParameterError
from .types import MomentEstimate, MomentSource, SampleBatch
from .utils import log_moments

logger = logging.getLogger(__name__)


def correlation_from_covariance(cov: np.ndarray) -> np.ndarray:
    scale = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = cov / np.outer(scale, scale)
    return corr


def empirical_moments(
    batch: SampleBatch, source: MomentSource = MomentSource.EMPIRICAL_NOISY
) -> MomentEstimate:
    """
    Sample mean, covariance and correlation of a ±1 batch.

    Covariances use the population (1/m) convention. Sums are accumulated in
    integer arithmetic, so the result is exact up to the final division and
    does not depend on summation order.

    Raises:
        InvalidParameterError: fewer than two samples.
        DegenerateColumnError: a column is constant (zero variance).
    """
    if batch.m < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {batch.m}")

    values = batch.values.astype(np.int64)
    sums = values.sum(axis=0)
    constant = np.flatnonzero(np.abs(sums) == batch.m)
    if constant.size:
        node = int(constant[0])
        raise DegenerateColumnError(
            f"column {node} is constant in all {batch.m} samples", node=node
        )

    products = values.T @ values
    mean = sums / batch.m
    cov = products / batch.m - np.outer(mean, mean)
    cov[np.diag_indices_from(cov)] = 1.0 - mean**2

    moments = MomentEstimate(
        mean=mean, cov=cov, corr=correlation_from_covariance(cov), source=source
    )
    log_moments(moments)
    return moments
