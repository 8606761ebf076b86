from typing import List, Sequence, Tuple

import numpy as np

from events.event_types import Recording

MAX_EVENTS_PER_SLICE = 80000


def subsample_events(num_events: int, max_events: int = MAX_EVENTS_PER_SLICE, seed=0) -> np.ndarray:
    """
    Indices of a uniform random subset of at most `max_events` events, in time order.
    """
    if num_events <= max_events:
        return np.arange(num_events)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(num_events, size=max_events, replace=False))


def get_train_val_split(recordings: Sequence[Recording], train_size, seed=0) -> Tuple[List[Recording], List[Recording]]:
    """
    Splits whole recordings into a training and a validation part. `train_size` is either a proportion or a count.
    """
    if 0 < train_size < 1:
        training_set_length = int(train_size * len(recordings))
    elif train_size >= 1:
        training_set_length = int(train_size)
    else:
        raise RuntimeError('Invalid argument for `train_size` given.')
    if training_set_length > len(recordings):
        raise ValueError('Training set size is larger than the number of recordings')

    permutation = np.random.default_rng(seed).permutation(len(recordings))
    training_set = [recordings[i] for i in permutation[:training_set_length]]
    validation_set = [recordings[i] for i in permutation[training_set_length:]]
    return training_set, validation_set


def log_norm_weights(flows: np.ndarray, norm_range=(0.01, 3.0), num_bins: int = 20) -> np.ndarray:
    """
    Per-event weights that make the weighted distribution of log(|u|) uniform over the occupied part of
    [log norm_range[0], log norm_range[1]]. Events outside the range get weight 0. The weights have mean 1
    over the weighted events.
    """
    norms = np.linalg.norm(flows, axis=1)
    in_range = (norms >= norm_range[0]) & (norms <= norm_range[1])
    weights = np.zeros(len(flows))
    if not in_range.any():
        return weights

    edges = np.linspace(np.log(norm_range[0]), np.log(norm_range[1]), num_bins + 1)
    bins = np.clip(np.digitize(np.log(norms[in_range]), edges) - 1, 0, num_bins - 1)
    counts = np.bincount(bins, minlength=num_bins)
    weights[in_range] = 1.0 / counts[bins]
    weights[in_range] *= in_range.sum() / weights[in_range].sum()
    return weights
