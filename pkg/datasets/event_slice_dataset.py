from typing import Optional, Sequence

import numpy as np
import torch
from torch.utils.data import Dataset

from datasets.augmentation import AugmentationConfig, augment
from events.event_types import EventCloud, Recording
from models.veckm import VecKMEncoder
from utils.dataset_utils import MAX_EVENTS_PER_SLICE, log_norm_weights, subsample_events
from utils.errors import EmptyDataset


class EventSliceDataset(Dataset):
    """
    Dataset of randomly placed event slices cut from a set of recordings.
    Each sample is one slice, encoded after augmentation, returned as (encodings, flows, weights) where
    the weights make log(|u|) uniformly distributed over `norm_range`.
    The sample drawn for index `idx` depends only on (seed, epoch, idx).
    """
    def __init__(
        self,
        recordings: Sequence[Recording],
        encoder: VecKMEncoder,
        slice_length: float = 0.02,
        max_events: int = MAX_EVENTS_PER_SLICE,
        norm_range=(0.01, 3.0),
        samples_per_epoch: int = 100,
        seed: int = 0,
        augmentation: Optional[AugmentationConfig] = None
    ):
        if len(recordings) == 0:
            raise EmptyDataset('The dataset does not contain any recording')
        if samples_per_epoch <= 0:
            raise EmptyDataset('The dataset has to provide at least one slice per epoch')
        self.recordings = list(recordings)
        self.encoder = encoder
        self.slice_length = slice_length
        self.max_events = max_events
        self.norm_range = norm_range
        self.samples_per_epoch = samples_per_epoch
        self.seed = seed
        self.augmentation = augmentation
        self.epoch = 0

    def set_epoch(self, epoch: int):
        self.epoch = epoch

    def __len__(self):
        return self.samples_per_epoch

    def get_slice(self, idx):
        """
        Returns the raw (coordinates, flows) of sample `idx` after augmentation and subsampling.
        """
        if idx < 0 or idx >= len(self):
            raise IndexError('Given index is out of range')
        rng = np.random.default_rng([self.seed, self.epoch, idx])
        recording = self.recordings[rng.integers(len(self.recordings))]
        cloud = recording.cloud

        latest_start = max(cloud.t[0], cloud.t[-1] - self.slice_length)
        t_start = rng.uniform(cloud.t[0], latest_start) if latest_start > cloud.t[0] else cloud.t[0]
        indices = cloud.time_slice(t_start, t_start + self.slice_length)
        if len(indices) == 0:
            indices = np.array([np.searchsorted(cloud.t, t_start).clip(max=len(cloud) - 1)])

        coordinates = cloud.coordinates[indices]
        flows = recording.flows[indices]
        if self.augmentation is not None:
            coordinates, flows = augment(coordinates, flows, self.augmentation, rng.integers(2**32))
        keep = subsample_events(len(coordinates), self.max_events, rng.integers(2**32))
        return coordinates[keep], flows[keep]

    def __getitem__(self, idx):
        coordinates, flows = self.get_slice(idx)
        encoding = self.encoder(EventCloud.from_coordinates(coordinates))
        weights = log_norm_weights(flows, self.norm_range)
        return (
            torch.from_numpy(encoding.as_real()),
            torch.from_numpy(flows.astype(np.float32)),
            torch.from_numpy(weights.astype(np.float32)),
        )
