from typing import Optional, Tuple

import numpy as np

from events.camera import CameraModel
from events.event_types import Event, PerEventFlow
from utils.errors import OutOfRange


class FlowFrameStack:
    """
    Frame based optical flow in raw (distorted) pixel coordinates.
    `flows[i]` holds the per-pixel displacement with shape (height, width, 2) at `timestamps[i]`.
    """
    def __init__(self, timestamps, flows, camera: Optional[CameraModel] = None):
        self.timestamps = np.asarray(timestamps, dtype=np.float64).reshape(-1)
        self.flows = np.asarray(flows, dtype=np.float64)
        if len(self.timestamps) < 2:
            raise ValueError('A flow frame stack needs at least two timestamps')
        if np.any(np.diff(self.timestamps) <= 0):
            raise ValueError('Flow frame timestamps have to be strictly increasing')
        if self.flows.ndim != 4 or self.flows.shape[0] != len(self.timestamps) or self.flows.shape[-1] != 2:
            raise ValueError(f'Flow grids have to be of shape (T, H, W, 2), got {self.flows.shape}')
        if camera is not None and self.flows.shape[1:3] != (camera.height, camera.width):
            raise ValueError(
                f'Flow grid size {self.flows.shape[2]}x{self.flows.shape[1]} does not match the camera '
                f'{camera.width}x{camera.height}'
            )

    @property
    def height(self):
        return self.flows.shape[1]

    @property
    def width(self):
        return self.flows.shape[2]

    @classmethod
    def from_forward_backward(cls, timestamps, forward_flows, backward_flows, camera=None):
        """
        Combines forward and backward flow frames into one displacement per frame: 0.5 * (forward - backward).
        """
        forward_flows = np.asarray(forward_flows, dtype=np.float64)
        backward_flows = np.asarray(backward_flows, dtype=np.float64)
        return cls(timestamps, 0.5 * (forward_flows - backward_flows), camera)

    @classmethod
    def load(cls, path, camera=None):
        data = np.load(path)
        if 'backward' in data:
            return cls.from_forward_backward(data['timestamps'], data['flows'], data['backward'], camera)
        return cls(data['timestamps'], data['flows'], camera)

    def save(self, path):
        np.savez(path, timestamps=self.timestamps, flows=self.flows)

    def bracket(self, t: float):
        """
        Returns the index i of the interval timestamps[i] <= t <= timestamps[i + 1].
        """
        if t < self.timestamps[0] or t > self.timestamps[-1]:
            raise OutOfRange(f'Timestamp {t} outside flow frames [{self.timestamps[0]}, {self.timestamps[-1]}]')
        idx = np.searchsorted(self.timestamps, t, side='right') - 1
        return int(min(idx, len(self.timestamps) - 2))

    def interpolate(self, event: Event) -> np.ndarray:
        idx = self.bracket(event.t)
        col = int(np.rint(event.x))
        row = int(np.rint(event.y))
        if not (0 <= col < self.width and 0 <= row < self.height):
            raise OutOfRange(f'Pixel ({event.x}, {event.y}) outside the {self.width}x{self.height} flow grid')

        t0, t1 = self.timestamps[idx], self.timestamps[idx + 1]
        w1 = (event.t - t0) / (t1 - t0)
        w0 = (t1 - event.t) / (t1 - t0)
        return w1 * self.flows[idx + 1, row, col] + w0 * self.flows[idx, row, col]


def interpolate_flow(stack: FlowFrameStack, e: Event) -> np.ndarray:
    """
    Linear interpolation in time between the two bracketing flow frames, nearest neighbor in space.
    `e` is given in raw pixel coordinates.
    """
    return stack.interpolate(e)


def per_event_flow(
    stack: FlowFrameStack,
    cam: CameraModel,
    e: Event,
    t0: Optional[float] = None,
    t1: Optional[float] = None
) -> PerEventFlow:
    """
    Converts the interpolated pixel displacement of a raw event into undistorted normalized flow per second.
    If no interval is given the interval of the bracketing flow frames is used.
    """
    if t0 is None or t1 is None:
        idx = stack.bracket(e.t)
        t0, t1 = stack.timestamps[idx], stack.timestamps[idx + 1]
    displacement = stack.interpolate(e)
    start = cam.undistort_normalize(np.array([e.x, e.y]))
    end = cam.undistort_normalize(np.array([e.x, e.y]) + displacement)
    return PerEventFlow((end - start) / (t1 - t0))


def per_event_flows(stack: FlowFrameStack, cam: CameraModel, t, px, py) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized `per_event_flow` for whole recordings in raw pixel coordinates.
    Returns an (N, 2) array of flows and the (N, 2) normalized undistorted event positions.
    """
    t = np.asarray(t, dtype=np.float64)
    pixels = np.stack([np.asarray(px, dtype=np.float64), np.asarray(py, dtype=np.float64)], axis=1)
    if t.min() < stack.timestamps[0] or t.max() > stack.timestamps[-1]:
        raise OutOfRange('Event timestamps outside the flow frame range')
    cols = np.rint(pixels[:, 0]).astype(np.int64)
    rows = np.rint(pixels[:, 1]).astype(np.int64)
    if np.any((cols < 0) | (cols >= stack.width) | (rows < 0) | (rows >= stack.height)):
        raise OutOfRange('Event pixels outside the flow grid')

    idx = np.clip(np.searchsorted(stack.timestamps, t, side='right') - 1, 0, len(stack.timestamps) - 2)
    t0, t1 = stack.timestamps[idx], stack.timestamps[idx + 1]
    w1 = ((t - t0) / (t1 - t0))[:, None]
    w0 = ((t1 - t) / (t1 - t0))[:, None]
    displacement = w1 * stack.flows[idx + 1, rows, cols] + w0 * stack.flows[idx, rows, cols]

    start = cam.undistort_normalize(pixels)
    end = cam.undistort_normalize(pixels + displacement)
    return (end - start) / (t1 - t0)[:, None], start
