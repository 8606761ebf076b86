"""
Circular statistics of flow directions.

"""

import numpy as np

from utils.errors import TooFewSamples


def mean_resultant(angles, mask=None, axis=-1):
    """
    Compute the mean of the unit vectors (cos a, sin a) along an axis.

    Parameters
    ----------
    angles : array like
        Angles in radians.
    mask : array like of bool, optional
        Angles with a False entry are ignored.
    axis : int
        Axis along which the angles are averaged.

    Returns
    -------
    x, y : arrays
        Components of the mean resultant vector. Positions without any angle are (0, 0).

    """
    angles = np.asanyarray(angles, dtype=np.float64)
    mask = np.ones(angles.shape, dtype=bool) if mask is None else np.asanyarray(mask, dtype=bool)
    count = mask.sum(axis=axis)
    safe_count = np.where(count > 0, count, 1)
    x = np.where(mask, np.cos(angles), 0.0).sum(axis=axis) / safe_count
    y = np.where(mask, np.sin(angles), 0.0).sum(axis=axis) / safe_count
    return x, y


def std_from_resultant_length(r_bar):
    """
    sqrt(-2 ln R) with R clipped to [0, 1]. R below 1e-12 gives +inf.
    """
    r_bar = np.clip(np.asanyarray(r_bar, dtype=np.float64), 0.0, 1.0)
    degenerate = r_bar < 1e-12
    sigma = np.sqrt(-2 * np.log(np.where(degenerate, 1.0, r_bar)))
    sigma = np.where(degenerate, np.inf, sigma)
    return float(sigma) if sigma.ndim == 0 else sigma


def circular_std(angles):
    """
    Compute the circular standard deviation of a set of angles in radians.

    Parameters
    ----------
    angles : array like
        At least two angles in radians.

    Returns
    -------
    std : float
        sqrt(-2 ln R) with R the mean resultant length, +inf for a vanishing resultant.

    """
    angles = np.asanyarray(angles, dtype=np.float64).reshape(-1)
    if len(angles) < 2:
        raise TooFewSamples(f'The circular standard deviation needs at least 2 angles, got {len(angles)}')
    x, y = mean_resultant(angles)
    return std_from_resultant_length(np.hypot(x, y))


def circular_mean(angles):
    """
    Compute the mean direction of a set of angles in radians.
    """
    x, y = mean_resultant(angles)
    return float(np.arctan2(y, x))
