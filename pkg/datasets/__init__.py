from .augmentation import AugmentationConfig, augment
from .event_slice_dataset import EventSliceDataset
from .synthetic_scene import (RigidMotion, SceneEdge, SimWindow, simulate, rotate_scene, random_scene, random_motion,
                              synthetic_recordings, read_scene, write_scene)

__all__ = [
    'AugmentationConfig', 'augment', 'EventSliceDataset', 'RigidMotion', 'SceneEdge', 'SimWindow', 'simulate',
    'rotate_scene', 'random_scene', 'random_motion', 'synthetic_recordings', 'read_scene', 'write_scene'
]
