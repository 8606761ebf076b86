from dataclasses import dataclass
from typing import Optional

import numpy as np

from utils.errors import EmptyInput, LengthMismatch


@dataclass(frozen=True)
class Event:
    """
    A single event. Positions are normalized camera coordinates (focal length 1) unless stated otherwise,
    timestamps are seconds relative to the start of the recording.
    The polarity is kept for file round trips but is not used by any prediction.
    """
    t: float
    x: float
    y: float
    polarity: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t >= 0):
            raise ValueError(f'Event timestamp has to be finite and non-negative, got {self.t}')
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f'Event position has to be finite, got ({self.x}, {self.y})')


class EventCloud:
    """
    Time ordered set of events stored as column arrays.
    """
    def __init__(self, t, x, y, polarity=None, check_sorted: bool = True):
        self.t = np.asarray(t, dtype=np.float64).reshape(-1)
        self.x = np.asarray(x, dtype=np.float64).reshape(-1)
        self.y = np.asarray(y, dtype=np.float64).reshape(-1)
        if polarity is None:
            polarity = np.ones(len(self.t), dtype=np.int8)
        self.polarity = np.asarray(polarity, dtype=np.int8).reshape(-1)

        if len(self.t) == 0:
            raise EmptyInput('An event cloud needs at least one event')
        if not (len(self.t) == len(self.x) == len(self.y) == len(self.polarity)):
            raise LengthMismatch('Event columns t, x, y and polarity have different lengths')
        if not (np.isfinite(self.t).all() and np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ValueError('Event cloud contains non-finite values')
        if check_sorted and np.any(np.diff(self.t) < 0):
            raise ValueError('Events have to be sorted by timestamp')

    def __len__(self):
        return len(self.t)

    def __getitem__(self, idx) -> Event:
        return Event(float(self.t[idx]), float(self.x[idx]), float(self.y[idx]), int(self.polarity[idx]))

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def coordinates(self) -> np.ndarray:
        """
        The events as an (N, 3) array with columns (t, x, y).
        """
        return np.stack([self.t, self.x, self.y], axis=1)

    @classmethod
    def from_coordinates(cls, coordinates: np.ndarray, polarity=None, check_sorted: bool = True):
        coordinates = np.asarray(coordinates, dtype=np.float64)
        return cls(coordinates[:, 0], coordinates[:, 1], coordinates[:, 2], polarity, check_sorted=check_sorted)

    @classmethod
    def from_events(cls, events):
        events = list(events)
        return cls([e.t for e in events], [e.x for e in events], [e.y for e in events],
                   [e.polarity for e in events])

    def subset(self, indices) -> 'EventCloud':
        return EventCloud(self.t[indices], self.x[indices], self.y[indices], self.polarity[indices], check_sorted=False)

    def time_slice(self, t_start: float, t_end: float) -> np.ndarray:
        """
        Returns the indices of all events with t_start <= t < t_end.
        """
        start = np.searchsorted(self.t, t_start, side='left')
        end = np.searchsorted(self.t, t_end, side='left')
        return np.arange(start, end)


@dataclass
class PerEventFlow:
    """
    Optical flow of a single event in normalized pixels per second.
    """
    u: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64).reshape(2)
        if not np.isfinite(self.u).all():
            raise ValueError('Per-event flow has to be finite')

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.u))


@dataclass
class Recording:
    """
    An event cloud together with its per-event optical flow and optional ground truth side channels.
    """
    cloud: EventCloud
    flows: np.ndarray
    normal_flows: Optional[np.ndarray] = None
    depths: Optional[np.ndarray] = None

    def __post_init__(self):
        self.flows = np.asarray(self.flows, dtype=np.float64).reshape(-1, 2)
        if len(self.flows) != len(self.cloud):
            raise LengthMismatch(f'{len(self.flows)} flows given for {len(self.cloud)} events')
        if self.normal_flows is not None:
            self.normal_flows = np.asarray(self.normal_flows, dtype=np.float64).reshape(-1, 2)
        if self.depths is not None:
            self.depths = np.asarray(self.depths, dtype=np.float64).reshape(-1)

    def __len__(self):
        return len(self.cloud)
