"""The two Scale rules applied to a factorized dictionary."""
import logging
import math

import numpy as np

from src.core.model import DenseMatrix, as_dense_matrix
from src.errors import DomainError
from utils.logger import get_logger

logger = get_logger("scaling", log_level=logging.DEBUG)

DEFAULT_SNAP_THRESHOLD: float = 0.5


def scale_snap(X_bar: DenseMatrix, snap_threshold: float = DEFAULT_SNAP_THRESHOLD) -> DenseMatrix:
    """
    Snaps every column to {-1, 0, 1}.

    Each column is divided by its largest absolute entry; entries with
    ``|e| >= snap_threshold`` become ``sign(e)``, all others 0. Zero columns stay zero.

    Args:
        X_bar (DenseMatrix): Factorized dictionary.
        snap_threshold (float): Keep threshold on the normalized magnitude.

    Returns:
        DenseMatrix: The snapped matrix.
    """
    matrix = as_dense_matrix(X_bar)
    peaks = np.max(np.abs(matrix), axis=0, initial=0.0)
    zero_columns = np.flatnonzero(peaks == 0.0)
    if zero_columns.size:
        logger.warning(f"scale_snap found zero columns {zero_columns.tolist()}; kept as zero.")
    normalized = matrix / np.where(peaks == 0.0, 1.0, peaks)
    return np.where(np.abs(normalized) >= snap_threshold, np.sign(normalized), 0.0)


def scale_rip(X_bar: DenseMatrix, A: DenseMatrix) -> DenseMatrix:
    """
    Multiplies X_bar by ``sqrt(n) / ||A||_F`` with n the row count of X_bar.

    Raises:
        DomainError: If A is the zero matrix.
    """
    matrix = as_dense_matrix(X_bar)
    frobenius = float(np.linalg.norm(as_dense_matrix(A)))
    if frobenius == 0.0:
        raise DomainError("scale_rip needs a nonzero system matrix.")
    return matrix * (math.sqrt(matrix.shape[0]) / frobenius)
