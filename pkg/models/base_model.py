from abc import abstractmethod

import torch
import torch.nn as nn

from utils.errors import ShapeMismatch


class BaseModel(nn.Module):
    """
    Base class of all heads mapping real encodings of shape (..., 2d) to normal flow vectors.
    Models run on the CPU so that predictions are reproducible.
    """
    def __init__(self, encoding_dim: int, name=None, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if encoding_dim < 1:
            raise ValueError(f'The encoding dimension has to be positive, got {encoding_dim}')
        self.name = name
        self.encoding_dim = encoding_dim
        self.input_dim = 2 * encoding_dim
        self.device = torch.device('cpu')

    @abstractmethod
    def predict_flow(self, X: torch.Tensor) -> torch.Tensor:
        pass

    def forward(self, X):
        if X.shape[-1] != self.input_dim:
            raise ShapeMismatch(f'Expected encodings with {self.input_dim} real inputs, got {X.shape[-1]}')
        return self.predict_flow(X)

    @property
    def linear_layers(self):
        return [m for m in self.modules() if isinstance(m, nn.Linear)]

    def zero_init(self):
        with torch.no_grad():
            for param in self.parameters():
                param.zero_()
        return self

    def count_parameters(self, only_trainable=False):
        return sum(param.numel() for param in self.parameters() if param.requires_grad or not only_trainable)

    def __str__(self):
        description = super().__str__() + f'\n Total number of parameters: {self.count_parameters()}'
        if self.name:
            return f'{self.name} (encoding dimension {self.encoding_dim})\n' + description
        return description
