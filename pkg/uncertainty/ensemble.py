from dataclasses import dataclass
from typing import Callable

import numpy as np
from tqdm.autonotebook import tqdm

from datasets.augmentation import rotate_events, rotate_flows
from events.event_types import EventCloud
from uncertainty.circular import mean_resultant, std_from_resultant_length
from utils.dataset_utils import MAX_EVENTS_PER_SLICE, subsample_events
from utils.errors import TooFewSamples

ZERO_MEMBER_NORM = 1e-8

# maps an event cloud to (N, 2) normal flow predictions
Predictor = Callable[[EventCloud], np.ndarray]


@dataclass
class EnsembleConfig:
    """
    K evenly spaced rotations 2 pi j / K. K = 1 disables the uncertainty estimate (sigma 0, all valid).
    """
    K: int = 5
    threshold: float = 0.3

    def __post_init__(self):
        if self.K < 1:
            raise ValueError('The ensemble needs at least one member')
        if self.threshold <= 0:
            raise ValueError('The uncertainty threshold has to be positive')

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.K) / self.K


@dataclass
class NormalFlowPrediction:
    n_hat: np.ndarray
    sigma: np.ndarray
    valid: np.ndarray

    def __len__(self):
        return len(self.n_hat)

    @classmethod
    def empty(cls, num_events: int):
        """
        Placeholder for events without a prediction: zero flow, infinite uncertainty, invalid.
        """
        return cls(np.zeros((num_events, 2)), np.full(num_events, np.inf), np.zeros(num_events, dtype=bool))


def ensemble_predict(cloud: EventCloud, predictor: Predictor, cfg: EnsembleConfig) -> np.ndarray:
    """
    Predicts on K rotated copies of the cloud and rotates every prediction back.
    Predictors with a `predict_rotations(cloud, angles)` method predict all copies in one call.
    Returns an array of shape (N, K, 2).
    """
    predict_rotations = getattr(predictor, 'predict_rotations', None)
    if predict_rotations is not None:
        predictions = predict_rotations(cloud, cfg.angles)
    else:
        predictions = [
            predictor(EventCloud.from_coordinates(rotate_events(cloud.coordinates, theta), cloud.polarity))
            for theta in cfg.angles
        ]
    members = [rotate_flows(np.asarray(p, dtype=np.float64), -theta) for p, theta in zip(predictions, cfg.angles)]
    return np.stack(members, axis=1)


def aggregate(ensemble: np.ndarray, cfg: EnsembleConfig) -> NormalFlowPrediction:
    """
    Polar average of the ensemble: circular mean direction, arithmetic mean magnitude, and the circular
    standard deviation of the member directions as uncertainty. Members with a norm below 1e-8 carry no
    direction; events with less than two directed members are invalid.
    """
    ensemble = np.asarray(ensemble, dtype=np.float64)
    if ensemble.ndim == 2:
        ensemble = ensemble[None]
    if ensemble.shape[1] < 2:
        raise TooFewSamples(f'Aggregation needs at least 2 ensemble members, got {ensemble.shape[1]}')

    norms = np.linalg.norm(ensemble, axis=2)
    directed = norms >= ZERO_MEMBER_NORM
    angles = np.arctan2(ensemble[..., 1], ensemble[..., 0])
    x, y = mean_resultant(angles, directed, axis=1)

    sigma = np.atleast_1d(std_from_resultant_length(np.hypot(x, y)))
    sigma = np.where(directed.sum(axis=1) < 2, np.inf, sigma)
    direction = np.arctan2(y, x)
    magnitude = norms.mean(axis=1)
    n_hat = magnitude[:, None] * np.stack([np.cos(direction), np.sin(direction)], axis=1)
    return NormalFlowPrediction(n_hat, sigma, sigma <= cfg.threshold)


def predict_with_uncertainty(cloud: EventCloud, predictor: Predictor, cfg: EnsembleConfig) -> NormalFlowPrediction:
    if cfg.K == 1:
        n_hat = np.asarray(predictor(cloud), dtype=np.float64)
        return NormalFlowPrediction(n_hat, np.zeros(len(n_hat)), np.ones(len(n_hat), dtype=bool))
    return aggregate(ensemble_predict(cloud, predictor, cfg), cfg)


class RotationEnsemble:
    """
    Wraps a normal flow predictor and runs it slice by slice with the rotation ensemble.
    At most `max_events` events per slice are predicted; the others are returned as invalid.
    """
    def __init__(
        self,
        predictor: Predictor,
        cfg: EnsembleConfig = EnsembleConfig(),
        slice_length: float = 0.02,
        max_events: int = MAX_EVENTS_PER_SLICE,
        seed: int = 0,
        log_progress: bool = False
    ):
        self.predictor = predictor
        self.cfg = cfg
        self.slice_length = slice_length
        self.max_events = max_events
        self.seed = seed
        self.log_progress = log_progress

    def __call__(self, cloud: EventCloud) -> NormalFlowPrediction:
        result = NormalFlowPrediction.empty(len(cloud))
        # events are sorted, so every window is a contiguous block
        windows = np.floor((cloud.t - cloud.t[0]) / self.slice_length).astype(np.int64)
        boundaries = np.flatnonzero(np.diff(windows)) + 1
        blocks = np.split(np.arange(len(cloud)), boundaries)
        for indices in tqdm(blocks, desc='Slices', leave=False, disable=not self.log_progress):
            window = int(windows[indices[0]])
            indices = indices[subsample_events(len(indices), self.max_events, [self.seed, window])]
            prediction = predict_with_uncertainty(cloud.subset(indices), self.predictor, self.cfg)
            result.n_hat[indices] = prediction.n_hat
            result.sigma[indices] = prediction.sigma
            result.valid[indices] = prediction.valid
        return result
