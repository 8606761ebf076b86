from typing import Sequence

import numpy as np
import torch
import torch.nn as nn

from models.base_model import BaseModel
from utils.errors import ShapeMismatch


class NormalFlowMLP(BaseModel):
    """
    Maps the real and imaginary parts of a local event encoding (2d inputs) to a normal flow vector.
    """
    def __init__(
        self,
        encoding_dim: int = 384,
        hidden_layer_list: Sequence[int] = (256, 256, 256),
        name='NormalFlowMLP',
        activation_function=nn.ReLU,
        *args,
        **kwargs
    ):
        super().__init__(encoding_dim, name, *args, **kwargs)
        self.hidden_layer_list = list(hidden_layer_list)

        modules = [nn.Linear(self.input_dim, self.hidden_layer_list[0]), activation_function()]
        for num_neurons in self.hidden_layer_list[1:]:
            modules.append(nn.Linear(modules[-2].out_features, num_neurons))
            modules.append(activation_function())
        modules.append(nn.Linear(modules[-2].out_features, 2))
        self.model = nn.Sequential(*modules)

    def predict_flow(self, X):
        return self.model(X)


def forward(G_row, model: NormalFlowMLP) -> np.ndarray:
    """
    Predicts the normal flow for complex encoding rows of shape (d,) or (N, d).
    """
    G_row = np.asarray(G_row)
    if G_row.shape[-1] != model.encoding_dim:
        raise ShapeMismatch(f'Encoding of dimension {G_row.shape[-1]} given to a model for dimension '
                            f'{model.encoding_dim}')
    real_input = np.concatenate([G_row.real, G_row.imag], axis=-1).astype(np.float32)
    model.eval()
    with torch.no_grad():
        output = model(torch.from_numpy(real_input))
    return output.numpy().astype(np.float64)
