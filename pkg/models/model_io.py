import numpy as np
import torch

from models.normal_flow_mlp import NormalFlowMLP
from models.veckm import RandomProjection
from utils.errors import UsageError

MODEL_MAGIC = b'NFM1'


def save_model(path, model: NormalFlowMLP, proj: RandomProjection):
    """
    Writes the model as NFM1: encoding dimension, projection seed and all linear layers, little-endian.
    """
    layers = model.linear_layers
    with open(path, 'wb') as f:
        f.write(MODEL_MAGIC)
        f.write(np.uint32(proj.d).astype('<u4').tobytes())
        f.write(np.uint64(proj.seed).astype('<u8').tobytes())
        f.write(np.uint32(len(layers)).astype('<u4').tobytes())
        for layer in layers:
            weight = layer.weight.detach().cpu().numpy()
            rows, cols = weight.shape
            f.write(np.array([rows, cols], dtype='<u4').tobytes())
            f.write(weight.astype('<f4').tobytes(order='C'))
            f.write(layer.bias.detach().cpu().numpy().astype('<f4').tobytes())


def load_model(path, sigma2: float = 25.0):
    """
    Reads an NFM1 model file and regenerates the random projection from the stored seed.
    """
    try:
        f = open(path, 'rb')
    except OSError as e:
        raise UsageError(f'Cannot open model file {path}: {e.strerror}')
    with f:
        if f.read(4) != MODEL_MAGIC:
            raise UsageError(f'{path} is not an NFM1 model file')
        d = int(np.frombuffer(f.read(4), dtype='<u4')[0])
        seed = int(np.frombuffer(f.read(8), dtype='<u8')[0])
        num_layers = int(np.frombuffer(f.read(4), dtype='<u4')[0])
        weights, biases = [], []
        for _ in range(num_layers):
            rows, cols = np.frombuffer(f.read(8), dtype='<u4')
            weights.append(np.frombuffer(f.read(4 * rows * cols), dtype='<f4').reshape(rows, cols))
            biases.append(np.frombuffer(f.read(4 * rows), dtype='<f4'))

    hidden = [w.shape[0] for w in weights[:-1]]
    model = NormalFlowMLP(encoding_dim=d, hidden_layer_list=hidden)
    with torch.no_grad():
        for layer, weight, bias in zip(model.linear_layers, weights, biases):
            layer.weight.copy_(torch.from_numpy(weight.copy()))
            layer.bias.copy_(torch.from_numpy(bias.copy()))
    return model, RandomProjection(seed=seed, d=d, sigma2=sigma2)
