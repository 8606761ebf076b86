from .base_model import BaseModel
from .normal_flow_mlp import NormalFlowMLP, forward
from .normal_flow_estimator import NormalFlowEstimator
from .veckm import (NeighborhoodSpec, RandomProjection, Encoding, VecKMEncoder, build_adjacency, encode,
                    reconstruct_density)
from .model_io import save_model, load_model

__all__ = [
    'BaseModel', 'NormalFlowMLP', 'forward', 'NormalFlowEstimator', 'NeighborhoodSpec', 'RandomProjection', 'Encoding',
    'VecKMEncoder', 'build_adjacency', 'encode', 'reconstruct_density', 'save_model', 'load_model'
]
