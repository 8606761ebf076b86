import numpy as np
import pandas as pd
import pytest
import torch

from datasets.augmentation import AugmentationConfig, rotate_events
from datasets.event_slice_dataset import EventSliceDataset
from datasets.synthetic_scene import RigidMotion, SceneEdge, SimWindow, simulate
from events.event_types import EventCloud, Recording
from models.model_io import load_model, save_model
from models.normal_flow_estimator import NormalFlowEstimator
from models.normal_flow_mlp import NormalFlowMLP, forward
from models.veckm import NeighborhoodSpec, RandomProjection, VecKMEncoder
from utils.dataset_utils import get_train_val_split, log_norm_weights, subsample_events
from utils.errors import EmptyDataset, ShapeMismatch
from utils.losses import MotionFieldLoss
from utils.training import TrainConfig, train_model
from utils.validation import evaluate, sign_correctness


@pytest.fixture
def edge_recording():
    edge = SceneEdge((-0.1, -0.05), (0.1, 0.05), 2.0, 150.0)
    return simulate([edge], RigidMotion([0.2, 0.0, 1.0], [0.0, 0.0, 0.0]), SimWindow(0.0, 0.06), seed=0)


@pytest.fixture
def encoder():
    return VecKMEncoder(NeighborhoodSpec(), RandomProjection(seed=0, d=32))


def small_model(seed=0):
    torch.manual_seed(seed)
    return NormalFlowMLP(encoding_dim=32, hidden_layer_list=[32])


class TestDatasetUtils:
    def test_subsample_cap(self):
        np.testing.assert_array_equal(subsample_events(5, 10), np.arange(5))
        indices = subsample_events(1000, 100, seed=[1, 2])
        assert len(indices) == 100
        assert np.all(np.diff(indices) > 0)
        np.testing.assert_array_equal(indices, subsample_events(1000, 100, seed=[1, 2]))

    def test_log_norm_weights(self):
        flows = np.array([[0.02, 0.0], [0.021, 0.0], [0.022, 0.0], [2.0, 0.0], [5.0, 0.0], [0.0, 0.0]])
        weights = log_norm_weights(flows)
        assert weights[4] == 0.0 and weights[5] == 0.0
        # the crowded bin gets the same total weight as the single large flow
        assert weights[:3].sum() == pytest.approx(weights[3])
        assert weights[:4].mean() == pytest.approx(1.0)

    def test_log_norm_weights_out_of_range(self):
        np.testing.assert_array_equal(log_norm_weights(np.full((3, 2), 10.0)), 0.0)

    def test_train_val_split(self, edge_recording):
        recordings = [edge_recording] * 10
        train, val = get_train_val_split(recordings, 0.8, seed=0)
        assert len(train) == 8 and len(val) == 2
        with pytest.raises(ValueError):
            get_train_val_split(recordings, 11)


class TestEventSliceDataset:
    def test_sample_shapes(self, edge_recording, encoder):
        dataset = EventSliceDataset([edge_recording], encoder, samples_per_epoch=3)
        x, y, weight = dataset[0]
        assert len(dataset) == 3
        assert x.shape == (len(y), 64)
        assert y.shape == (len(y), 2)
        assert weight.shape == (len(y), )
        assert x.dtype == torch.float32

    def test_samples_depend_on_seed_epoch_and_index(self, edge_recording, encoder):
        dataset = EventSliceDataset([edge_recording], encoder, seed=1, augmentation=AugmentationConfig())
        first, _ = dataset.get_slice(2)
        again, _ = dataset.get_slice(2)
        np.testing.assert_array_equal(first, again)
        dataset.set_epoch(1)
        other, _ = dataset.get_slice(2)
        assert not np.array_equal(first, other)

    def test_slices_are_short(self, edge_recording, encoder):
        dataset = EventSliceDataset([edge_recording], encoder, slice_length=0.02)
        coordinates, _ = dataset.get_slice(0)
        assert coordinates[:, 0].max() - coordinates[:, 0].min() < 0.02

    def test_event_cap(self, edge_recording, encoder):
        dataset = EventSliceDataset([edge_recording], encoder, max_events=50)
        coordinates, flows = dataset.get_slice(0)
        assert len(coordinates) == len(flows) == 50

    def test_empty(self, encoder):
        with pytest.raises(EmptyDataset):
            EventSliceDataset([], encoder)
        recording = Recording(EventCloud([0.0], [0.0], [0.0]), np.array([[1.0, 0.0]]))
        dataset = EventSliceDataset([recording], encoder, samples_per_epoch=1)
        coordinates, _ = dataset.get_slice(0)
        assert len(coordinates) == 1
        with pytest.raises(IndexError):
            dataset.get_slice(1)


class TestModel:
    def test_zero_init(self):
        model = small_model().zero_init()
        output = forward(np.exp(1j * np.arange(32)), model)
        np.testing.assert_array_equal(output, [0.0, 0.0])

    def test_deterministic_forward(self):
        row = np.exp(1j * np.linspace(0, 3, 32)) / np.sqrt(32)
        np.testing.assert_array_equal(forward(row, small_model(3)), forward(row, small_model(3)))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            forward(np.ones(16, dtype=np.complex128), small_model())
        with pytest.raises(ShapeMismatch):
            small_model()(torch.ones(4, 10))

    def test_model_file(self, tmp_path, edge_recording, encoder):
        model = small_model(1)
        save_model(tmp_path / 'model.nfm', model, encoder.proj)
        loaded, proj = load_model(tmp_path / 'model.nfm')
        assert proj.seed == 0 and proj.d == 32
        np.testing.assert_array_equal(proj.A, encoder.proj.A)
        cloud = edge_recording.cloud.subset(np.arange(100))
        np.testing.assert_array_equal(
            NormalFlowEstimator(loaded, encoder)(cloud),
            NormalFlowEstimator(model, encoder)(cloud)
        )

    def test_rotated_predictions_share_adjacency(self, edge_recording, encoder):
        estimator = NormalFlowEstimator(small_model(), encoder)
        cloud = edge_recording.cloud.subset(np.arange(300))
        angles = 2 * np.pi * np.arange(5) / 5
        for theta, prediction in zip(angles, estimator.predict_rotations(cloud, angles)):
            rotated = EventCloud.from_coordinates(rotate_events(cloud.coordinates, theta), cloud.polarity)
            np.testing.assert_allclose(prediction, estimator(rotated), atol=1e-6)

    def test_estimator_dimension_check(self):
        with pytest.raises(ValueError):
            NormalFlowEstimator(small_model(), VecKMEncoder(NeighborhoodSpec(), RandomProjection(d=16)))


class TestTraining:
    def run_training(self, recording, encoder, num_epochs, **kwargs):
        model = small_model(0)
        dataset = EventSliceDataset([recording], encoder, samples_per_epoch=10, seed=0)
        optimizer = torch.optim.Adam(model.parameters(), lr=1e-3)
        losses = train_model(model, dataset, optimizer, num_epochs, MotionFieldLoss(0.1), **kwargs)
        return model, losses

    def test_deterministic(self, edge_recording, encoder):
        first, first_losses = self.run_training(edge_recording, encoder, 1)
        second, second_losses = self.run_training(edge_recording, encoder, 1)
        assert first_losses == second_losses
        for p, q in zip(first.parameters(), second.parameters()):
            torch.testing.assert_close(p, q, rtol=0, atol=0)

    def test_loss_decreases(self, edge_recording, encoder):
        _, losses = self.run_training(edge_recording, encoder, 5)
        assert len(losses) == 5
        assert losses[-1] < losses[0]

    def test_log_and_model_file(self, tmp_path, edge_recording, encoder):
        model, _ = self.run_training(
            edge_recording,
            encoder,
            2,
            filename=str(tmp_path / 'model.nfm'),
            projection=encoder.proj,
            log_file=str(tmp_path / 'log.csv')
        )
        log = pd.read_csv(tmp_path / 'log.csv')
        assert list(log.columns) == ['epoch', 'mean_loss', 'mean_pee_train']
        assert list(log['epoch']) == [0, 1]
        assert (tmp_path / 'model.nfm').exists()

    def test_validation_metrics(self, edge_recording, encoder):
        model = small_model()
        dataset = EventSliceDataset([edge_recording], encoder, samples_per_epoch=2)
        assert np.isfinite(evaluate(model, dataset))
        assert 0.0 <= sign_correctness(model, dataset) <= 100.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(epsilon=0.0)
        with pytest.raises(ValueError):
            TrainConfig(norm_range=(3.0, 0.01))
