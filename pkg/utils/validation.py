import torch

from metrics.flow_metrics import PEEMetric, PosPctMetric


def evaluate(model, dataset, metric=None):
    """
    Mean projection endpoint error of the model over all slices of the dataset (mean of per-slice means).
    Only events with a positive sampling weight are evaluated.
    """
    model.eval()
    metric = metric if metric is not None else PEEMetric()
    metric.reset()
    dataloader = torch.utils.data.DataLoader(dataset, batch_size=None, shuffle=False, num_workers=0)
    with torch.no_grad():
        model.to(model.device)
        for x, y, weight in dataloader:
            output = model(x.to(model.device)).cpu()
            keep = (weight > 0).numpy()
            metric.update(output.double().numpy()[keep], y.double().numpy()[keep])
    return metric.compute_metric()


def sign_correctness(model, dataset):
    return evaluate(model, dataset, PosPctMetric())
