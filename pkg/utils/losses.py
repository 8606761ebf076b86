import torch
import torch.nn as nn

DEGENERATE_NORM = 1e-8


def _norm(v: torch.Tensor) -> torch.Tensor:
    # the tiny offset keeps the gradient finite at the origin
    return torch.sqrt((v * v).sum(dim=-1) + 1e-30)


def radial_loss(u: torch.Tensor, n_hat: torch.Tensor, eps: float = 0.1) -> torch.Tensor:
    """
    Zero iff the prediction lies on the circle with the optical flow u as diameter.
    """
    half = u / 2
    return torch.log((eps + _norm(n_hat - half)) / (eps + _norm(half)))**2


def angular_loss(u: torch.Tensor, n_hat: torch.Tensor) -> torch.Tensor:
    """
    Negative cosine between (n_hat - u/2) and u. Degenerate samples contribute zero.
    """
    offset = n_hat - u / 2
    offset_norm = _norm(offset)
    u_norm = _norm(u)
    valid = (u_norm >= DEGENERATE_NORM) & (offset_norm >= DEGENERATE_NORM)
    denominator = torch.where(valid, offset_norm * u_norm, torch.ones_like(u_norm))
    cosine = (offset * u).sum(dim=-1) / denominator
    return torch.where(valid, -cosine, torch.zeros_like(cosine))


def motion_field_loss(u: torch.Tensor, n_hat: torch.Tensor, eps: float = 0.1) -> torch.Tensor:
    return radial_loss(u, n_hat, eps) + angular_loss(u, n_hat)


def baseline_norm_direction_loss(u: torch.Tensor, u_hat: torch.Tensor, eps: float = 0.1) -> torch.Tensor:
    """
    Optical flow loss used for the ablation: squared log norm ratio plus negative cosine.
    """
    u_norm = _norm(u)
    u_hat_norm = _norm(u_hat)
    norm_term = torch.log((eps + u_norm) / (eps + u_hat_norm))**2
    valid = (u_norm >= DEGENERATE_NORM) & (u_hat_norm >= DEGENERATE_NORM)
    denominator = torch.where(valid, u_norm * u_hat_norm, torch.ones_like(u_norm))
    cosine = (u * u_hat).sum(dim=-1) / denominator
    return norm_term + torch.where(valid, -cosine, torch.zeros_like(cosine))


class MotionFieldLoss(nn.Module):
    """
    Mean motion field loss over all events whose optical flow is not degenerate.
    """
    def __init__(self, eps: float = 0.1):
        super().__init__()
        if eps <= 0:
            raise ValueError('eps has to be positive')
        self.eps = eps

    def sample_loss(self, u, n_hat):
        return motion_field_loss(u, n_hat, self.eps)

    def forward(self, output: torch.Tensor, target: torch.Tensor, weight: torch.Tensor = None) -> torch.Tensor:
        keep = _norm(target) >= DEGENERATE_NORM
        if weight is not None:
            keep = keep & (weight > 0)
        if not keep.any():
            return output.sum() * 0.0
        losses = self.sample_loss(target[keep], output[keep])
        if weight is None:
            return losses.mean()
        weight = weight[keep]
        return (losses * weight).sum() / weight.sum()


class NormDirectionLoss(MotionFieldLoss):
    def sample_loss(self, u, u_hat):
        return baseline_norm_direction_loss(u, u_hat, self.eps)
