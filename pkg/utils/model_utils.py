import numpy as np
import torch


def get_model_predictions(model, inputs: np.ndarray, batch_size=8192) -> np.ndarray:
    """
    Runs the model over the real valued inputs in batches and returns the outputs as a float64 array.
    """
    model.eval()
    dataloader = torch.utils.data.DataLoader(
        torch.utils.data.TensorDataset(torch.from_numpy(np.ascontiguousarray(inputs, dtype=np.float32))),
        batch_size=batch_size,
        shuffle=False,
    )
    predictions = []
    with torch.no_grad():
        model.to(model.device)
        for (x, ) in dataloader:
            predictions.append(model(x.to(model.device)).cpu())

    predictions = torch.cat(predictions) if len(predictions) > 0 else torch.empty(0, 2)
    return predictions.numpy().astype(np.float64)
