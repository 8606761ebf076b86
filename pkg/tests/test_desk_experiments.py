import numpy as np
import pytest

from experiments.synthetic_experiments import desk_recordings, ensemble_study, loss_ablation, parser
from metrics.flow_metrics import pee, uncertainty_correlation
from uncertainty.ensemble import EnsembleConfig, RotationEnsemble

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def desk_run():
    args = parser.parse_args([])
    train_recordings, test_recordings = desk_recordings(args)
    rows, estimator = loss_ablation(args, train_recordings, test_recordings)
    return {row['loss']: row for row in rows}, estimator, test_recordings


def test_motion_field_head(desk_run):
    rows, _, _ = desk_run
    assert rows['motion_field']['pee'] < 0.10
    assert rows['motion_field']['pos_pct'] > 95.0


def test_motion_field_loss_beats_norm_direction(desk_run):
    rows, _, _ = desk_run
    assert rows['motion_field']['pee'] < rows['norm_direction']['pee']


def test_uncertainty_tracks_error(desk_run):
    _, estimator, test_recordings = desk_run
    predictor = RotationEnsemble(estimator, EnsembleConfig(K=5))
    sigma, errors = [], []
    for recording in test_recordings:
        prediction = predictor(recording.cloud)
        sigma.append(prediction.sigma)
        errors.append(pee(recording.flows, prediction.n_hat))
    sigma, errors = np.concatenate(sigma), np.concatenate(errors)
    assert (np.isfinite(sigma) & np.isfinite(errors)).sum() >= 10000
    assert uncertainty_correlation(sigma, errors) > 0.2


def test_ensemble_study_keeps_default_threshold(desk_run):
    _, estimator, test_recordings = desk_run
    rows = ensemble_study(estimator, test_recordings)
    assert any(row['K'] == 5 and row['threshold'] == 0.3 for row in rows)
