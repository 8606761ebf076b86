import numpy as np
from scipy.integrate import trapezoid

from utils.errors import InsufficientData


def time_weighted_mean(t, values, t_start: float, t_end: float) -> np.ndarray:
    """
    Mean of a piecewise linear signal over [t_start, t_end]. Samples are interpolated linearly and held
    constant outside the sampled range.
    """
    t = np.asarray(t, dtype=np.float64)
    if len(t) == 0:
        raise InsufficientData('The signal does not contain any sample')
    values = np.asarray(values, dtype=np.float64).reshape(len(t), -1)
    if t_end <= t_start:
        return np.array([np.interp(t_start, t, values[:, i]) for i in range(values.shape[1])])

    inside = t[(t > t_start) & (t < t_end)]
    knots = np.concatenate([[t_start], inside, [t_end]])
    means = []
    for i in range(values.shape[1]):
        samples = np.interp(knots, t, values[:, i])
        means.append(trapezoid(samples, knots) / (t_end - t_start))
    return np.array(means)
