import numpy as np

from utils.errors import EmptyInput, LengthMismatch


def scale_to_speed(directions, gt) -> np.ndarray:
    """
    Scales unit translation estimates by the ground truth speed of the matching window.
    """
    directions = np.asarray(directions, dtype=np.float64).reshape(-1, 3)
    gt = np.asarray(gt, dtype=np.float64).reshape(-1, 3)
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    units = directions / np.where(norms > 0, norms, 1.0)
    return units * np.linalg.norm(gt, axis=1, keepdims=True)


def rms_velocity(estimates, gt) -> float:
    """
    Root mean squared error in m/s between speed scaled translation estimates and ground truth velocities.
    """
    estimates = np.asarray(estimates, dtype=np.float64).reshape(-1, 3)
    gt = np.asarray(gt, dtype=np.float64).reshape(-1, 3)
    if len(estimates) != len(gt):
        raise LengthMismatch(f'{len(estimates)} estimates given for {len(gt)} ground truth velocities')
    if len(gt) == 0:
        raise EmptyInput('No velocities to compare')
    errors = np.linalg.norm(scale_to_speed(estimates, gt) - gt, axis=1)
    return float(np.sqrt(np.mean(errors**2)))
