from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass
class AugmentationConfig:
    """
    Random rotation about the optical axis, random spatial scaling and random subsampling of the events.
    """
    rotation: bool = True
    scale_range: Tuple[float, float] = (0.75, 1.25)
    sample_range: Tuple[float, float] = (0.5, 1.0)

    def __post_init__(self):
        if not (0 < self.scale_range[0] <= self.scale_range[1]):
            raise ValueError('Invalid scale range')
        if not (0 < self.sample_range[0] <= self.sample_range[1] <= 1):
            raise ValueError('Invalid sample fraction range')


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate_events(coordinates: np.ndarray, theta: float) -> np.ndarray:
    """
    Rotates (t, x, y) rows in the image plane by right multiplication with diag(1, R(theta)).
    """
    rotated = np.array(coordinates, dtype=np.float64, copy=True)
    rotated[:, 1:] = rotated[:, 1:] @ rotation_matrix(theta)
    return rotated


def rotate_flows(flows: np.ndarray, theta: float) -> np.ndarray:
    """
    Rotates flow rows by right multiplication with R(theta), the convention used for the events.
    """
    return np.asarray(flows, dtype=np.float64) @ rotation_matrix(theta)


def scale_events(coordinates: np.ndarray, alpha: float) -> np.ndarray:
    # only the spatial coordinates are scaled, timestamps and flows stay untouched
    scaled = np.array(coordinates, dtype=np.float64, copy=True)
    scaled[:, 1:] *= alpha
    return scaled


def sample_events(num_events: int, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """
    Indices of a uniform random subset containing round(fraction * num_events) events, in time order.
    """
    num_kept = max(1, int(round(fraction * num_events)))
    if num_kept >= num_events:
        return np.arange(num_events)
    return np.sort(rng.choice(num_events, size=num_kept, replace=False))


def augment(coordinates: np.ndarray, flows: np.ndarray, cfg: AugmentationConfig, seed) -> Tuple[np.ndarray, np.ndarray]:
    """
    Applies rotation, scaling and subsampling (in this order) jointly to events and flows.
    """
    if len(coordinates) != len(flows):
        raise ValueError('Events and flows have to be aligned')
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi) if cfg.rotation else 0.0
    alpha = rng.uniform(*cfg.scale_range)
    fraction = rng.uniform(*cfg.sample_range)

    coordinates = rotate_events(coordinates, theta)
    flows = rotate_flows(flows, theta)
    coordinates = scale_events(coordinates, alpha)
    keep = sample_events(len(coordinates), fraction, rng)
    return coordinates[keep], flows[keep]
