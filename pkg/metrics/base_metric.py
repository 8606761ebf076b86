from abc import abstractmethod

import numpy as np


class BaseMetric():
    """
    Accumulates one value per evaluation window; the metric is the unweighted mean over windows.
    """
    def __init__(self, name):
        self._window_values = []
        self._num_samples = 0
        self._num_masked = 0
        self.name = name
        super().__init__()

    def reset(self):
        self._window_values = []
        self._num_samples = 0
        self._num_masked = 0

    @property
    def num_samples(self):
        return self._num_samples

    @property
    def num_masked(self):
        return self._num_masked

    @abstractmethod
    def update(self, predictions: np.ndarray, flows: np.ndarray):
        pass

    def compute_metric(self):
        if len(self._window_values) == 0:
            return float('nan')
        return float(np.mean(self._window_values))
