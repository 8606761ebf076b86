from .event_types import Event, EventCloud, PerEventFlow, Recording
from .camera import CameraModel, undistort_normalize
from .flow_frames import FlowFrameStack, interpolate_flow, per_event_flow, per_event_flows

__all__ = [
    'Event', 'EventCloud', 'PerEventFlow', 'Recording', 'CameraModel', 'undistort_normalize', 'FlowFrameStack',
    'interpolate_flow', 'per_event_flow', 'per_event_flows'
]
