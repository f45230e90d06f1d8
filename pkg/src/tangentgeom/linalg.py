import numpy as np

from .errors import SingularMetric

PIVOT_THRESHOLD = 1e-12


def pivoted_inverse(a, threshold=PIVOT_THRESHOLD):
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    Raises SingularMetric as soon as the best available pivot falls below
    ``threshold`` in absolute value, instead of returning garbage.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    work = np.hstack([a, np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(work[col:, col])))
        if abs(work[piv, col]) < threshold:
            raise SingularMetric(f"pivot {work[piv, col]:.3e} below {threshold:g} in column {col}")
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        work[col] /= work[col, col]
        others = np.arange(n) != col
        work[others] -= np.outer(work[others, col], work[col])
    return work[:, n:]
