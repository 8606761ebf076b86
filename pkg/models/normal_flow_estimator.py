from typing import List, Sequence

import numpy as np

from datasets.augmentation import rotate_events
from events.event_types import EventCloud
from models.normal_flow_mlp import NormalFlowMLP
from models.veckm import Encoding, VecKMEncoder
from utils.model_utils import get_model_predictions


class NormalFlowEstimator:
    """
    Encodes an event cloud with VecKM and predicts one normal flow per event with the MLP head.
    """
    def __init__(self, model: NormalFlowMLP, encoder: VecKMEncoder, batch_size: int = 8192):
        if model.encoding_dim != encoder.d:
            raise ValueError(f'Model expects encodings of dimension {model.encoding_dim}, encoder produces {encoder.d}')
        self.model = model
        self.encoder = encoder
        self.batch_size = batch_size

    def encode(self, cloud: EventCloud) -> Encoding:
        return self.encoder(cloud)

    def predict_encoding(self, encoding: Encoding) -> np.ndarray:
        return get_model_predictions(self.model, encoding.as_real(), batch_size=self.batch_size)

    def predict(self, cloud: EventCloud) -> np.ndarray:
        """
        Returns the (N, 2) normal flow predictions in normalized pixels per second.
        """
        return self.predict_encoding(self.encode(cloud))

    __call__ = predict

    def predict_rotations(self, cloud: EventCloud, angles: Sequence[float]) -> List[np.ndarray]:
        """
        Predictions on copies of the cloud rotated by each angle, in the rotated frames.
        With equal spatial radii the adjacency of the unrotated cloud is shared by all copies.
        """
        adj = self.encoder.adjacency(cloud) if self.encoder.spec.rotation_invariant else None
        predictions = []
        for theta in angles:
            rotated = EventCloud.from_coordinates(rotate_events(cloud.coordinates, theta), cloud.polarity)
            predictions.append(self.predict_encoding(self.encoder(rotated, adj)))
        return predictions
