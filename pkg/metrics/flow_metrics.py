from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import torch
from torchmetrics.functional import spearman_corrcoef

from metrics.base_metric import BaseMetric
from utils.errors import EmptyInput, LengthMismatch

ZERO_PREDICTION_NORM = 1e-8


def pee(u, n_hat):
    """
    Projection endpoint error |u . n_hat / |n_hat| - |n_hat||. Predictions with a norm of at most 1e-8 are
    masked and return NaN.
    """
    u = np.asarray(u, dtype=np.float64)
    n_hat = np.asarray(n_hat, dtype=np.float64)
    if u.shape != n_hat.shape:
        raise LengthMismatch(f'Flows of shape {u.shape} and predictions of shape {n_hat.shape} do not match')
    norm = np.linalg.norm(n_hat, axis=-1)
    masked = norm <= ZERO_PREDICTION_NORM
    safe_norm = np.where(masked, 1.0, norm)
    errors = np.abs(np.sum(u * n_hat, axis=-1) / safe_norm - norm)
    errors = np.where(masked, np.nan, errors)
    return float(errors) if errors.ndim == 0 else errors


def pos_pct(u, n_hat) -> float:
    """
    Percentage of unmasked pairs whose prediction points into the half plane of the optical flow.
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1, 2)
    n_hat = np.asarray(n_hat, dtype=np.float64).reshape(-1, 2)
    if len(u) != len(n_hat):
        raise LengthMismatch(f'{len(u)} flows given for {len(n_hat)} predictions')
    unmasked = np.linalg.norm(n_hat, axis=1) > ZERO_PREDICTION_NORM
    if not unmasked.any():
        raise EmptyInput('No unmasked prediction to evaluate')
    dots = np.sum(u[unmasked] * n_hat[unmasked], axis=1)
    return 100.0 * float(np.mean(dots > 0))


class PEEMetric(BaseMetric):
    def __init__(self, name='pee'):
        super().__init__(name)

    def update(self, predictions, flows):
        errors = np.atleast_1d(pee(flows, predictions))
        masked = np.isnan(errors)
        self._num_masked += int(masked.sum())
        self._num_samples += int((~masked).sum())
        if (~masked).any():
            self._window_values.append(float(np.mean(errors[~masked])))


class PosPctMetric(BaseMetric):
    def __init__(self, name='pos_pct'):
        super().__init__(name)

    def update(self, predictions, flows):
        predictions = np.asarray(predictions).reshape(-1, 2)
        unmasked = np.linalg.norm(predictions, axis=1) > ZERO_PREDICTION_NORM
        self._num_masked += int((~unmasked).sum())
        self._num_samples += int(unmasked.sum())
        if unmasked.any():
            self._window_values.append(pos_pct(flows, predictions))


@dataclass
class FlowEvalReport:
    pee_mean: float
    pos_pct: float
    n_evaluated: int
    n_masked: int
    n_invalid: int = 0
    pos_pct_all: Optional[float] = None
    spearman: Optional[float] = None

    def summary(self) -> str:
        return f'PEE={self.pee_mean:.6f} PosPct={self.pos_pct:.4f} n={self.n_evaluated} masked={self.n_masked}'

    def details(self) -> str:
        line = f'invalid={self.n_invalid}'
        if self.pos_pct_all is not None:
            line += f' PosPctAll={self.pos_pct_all:.4f}'
        if self.spearman is not None:
            line += f' Spearman={self.spearman:.4f}'
        return line


@dataclass
class WindowResult:
    t_start: float
    t_end: float
    pee: float
    pos_pct: float
    n: int
    masked: int


def window_ids(t, window_length: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return np.floor((t - t[0]) / window_length).astype(np.int64)


def uncertainty_correlation(sigma, errors) -> float:
    """
    Spearman rank correlation between uncertainty and error over the events where both are finite.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    finite = np.isfinite(sigma) & np.isfinite(errors)
    if finite.sum() < 2:
        raise EmptyInput('At least two events with finite uncertainty and error are needed')
    return float(spearman_corrcoef(torch.from_numpy(sigma[finite]), torch.from_numpy(errors[finite])))


def evaluate_flow(u, n_hat, valid=None, windows=None, sigma=None) -> FlowEvalReport:
    """
    Evaluates predictions against ground truth optical flow. Events flagged invalid by the ensemble are
    excluded from PEE and PosPct; PosPctAll also counts them. Metrics are averaged per window, then over windows.
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1, 2)
    n_hat = np.asarray(n_hat, dtype=np.float64).reshape(-1, 2)
    if len(u) != len(n_hat):
        raise LengthMismatch(f'{len(u)} flows given for {len(n_hat)} predictions')
    if len(u) == 0:
        raise EmptyInput('No events to evaluate')
    valid = np.ones(len(u), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    windows = np.zeros(len(u), dtype=np.int64) if windows is None else np.asarray(windows)

    pee_metric, pos_metric, pos_all_metric = PEEMetric(), PosPctMetric(), PosPctMetric('pos_pct_all')
    for window in np.unique(windows):
        in_window = windows == window
        selected = in_window & valid
        pee_metric.update(n_hat[selected], u[selected])
        pos_metric.update(n_hat[selected], u[selected])
        pos_all_metric.update(n_hat[in_window], u[in_window])

    if pee_metric.num_samples == 0:
        raise EmptyInput('All predictions are masked or invalid')

    spearman = None
    if sigma is not None:
        spearman = uncertainty_correlation(sigma, pee(u, n_hat))

    return FlowEvalReport(
        pee_mean=pee_metric.compute_metric(),
        pos_pct=pos_metric.compute_metric(),
        n_evaluated=pee_metric.num_samples,
        n_masked=pee_metric.num_masked,
        n_invalid=int((~valid).sum()),
        pos_pct_all=pos_all_metric.compute_metric(),
        spearman=spearman,
    )


def per_window_breakdown(t, u, n_hat, valid=None, window_length: float = 0.02) -> List[WindowResult]:
    t = np.asarray(t, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64).reshape(-1, 2)
    n_hat = np.asarray(n_hat, dtype=np.float64).reshape(-1, 2)
    valid = np.ones(len(t), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    ids = window_ids(t, window_length)

    results = []
    for window in np.unique(ids):
        selected = (ids == window) & valid
        errors = np.atleast_1d(pee(u[selected], n_hat[selected]))
        unmasked = ~np.isnan(errors)
        results.append(
            WindowResult(
                t_start=t[0] + window * window_length,
                t_end=t[0] + (window + 1) * window_length,
                pee=float(np.mean(errors[unmasked])) if unmasked.any() else float('nan'),
                pos_pct=pos_pct(u[selected], n_hat[selected]) if unmasked.any() else float('nan'),
                n=int(unmasked.sum()),
                masked=int((~unmasked).sum()),
            )
        )
    return results
