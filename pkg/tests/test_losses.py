import math

import numpy as np
import pytest
import torch

from datasets.augmentation import AugmentationConfig, augment, rotate_events, rotate_flows, sample_events, scale_events
from utils.losses import (MotionFieldLoss, NormDirectionLoss, angular_loss, baseline_norm_direction_loss,
                          motion_field_loss, radial_loss)


def vec(x, y):
    return torch.tensor([x, y], dtype=torch.float64)


class TestMotionFieldLoss:
    def test_radial_loss_on_circle(self):
        assert radial_loss(vec(1, 0), vec(0.5, 0.5), 0.1).item() == pytest.approx(0.0, abs=1e-12)
        assert radial_loss(vec(1, 0), vec(0, 0), 0.1).item() == pytest.approx(0.0, abs=1e-12)

    def test_radial_loss_off_circle(self):
        assert radial_loss(vec(1, 0), vec(2, 0), 0.1).item() == pytest.approx(math.log(1.6 / 0.6)**2, rel=1e-9)
        assert radial_loss(vec(1, 0), vec(2, 0), 0.1).item() == pytest.approx(0.96203, abs=1e-5)

    def test_angular_loss(self):
        assert angular_loss(vec(1, 0), vec(1, 0)).item() == pytest.approx(-1.0)
        assert angular_loss(vec(1, 0), vec(0, 0)).item() == pytest.approx(1.0)
        assert angular_loss(vec(1, 0), vec(0.5, 0.5)).item() == pytest.approx(0.0, abs=1e-12)

    def test_motion_field_loss(self):
        assert motion_field_loss(vec(1, 0), vec(1, 0), 0.1).item() == pytest.approx(-1.0)
        assert motion_field_loss(vec(1, 0), vec(0, 0), 0.1).item() == pytest.approx(1.0)

    def test_gradients_are_orthogonal(self):
        generator = torch.Generator().manual_seed(0)
        u = torch.randn(100, 2, generator=generator, dtype=torch.float64)
        n_hat = torch.randn(100, 2, generator=generator, dtype=torch.float64).requires_grad_()
        radial_grad, = torch.autograd.grad(radial_loss(u, n_hat, 0.1).sum(), n_hat)
        angular_grad, = torch.autograd.grad(angular_loss(u, n_hat).sum(), n_hat)
        cosine = (radial_grad * angular_grad).sum(dim=1) / (radial_grad.norm(dim=1) * angular_grad.norm(dim=1))
        assert cosine.abs().max().item() < 1e-5

    def test_finite_gradient_at_zero_prediction(self):
        n_hat = torch.zeros(1, 2, dtype=torch.float64, requires_grad=True)
        loss = MotionFieldLoss()(n_hat, torch.tensor([[1.0, 0.0]], dtype=torch.float64))
        loss.backward()
        assert torch.isfinite(n_hat.grad).all()

    def test_zero_flow_is_ignored(self):
        output = torch.tensor([[1.0, 0.0], [5.0, 5.0]], dtype=torch.float64)
        target = torch.tensor([[1.0, 0.0], [0.0, 0.0]], dtype=torch.float64)
        assert MotionFieldLoss()(output, target).item() == pytest.approx(-1.0)

    def test_weights(self):
        output = torch.tensor([[1.0, 0.0], [0.0, 0.0]], dtype=torch.float64)
        target = torch.tensor([[1.0, 0.0], [1.0, 0.0]], dtype=torch.float64)
        loss = MotionFieldLoss()(output, target, torch.tensor([3.0, 1.0], dtype=torch.float64))
        assert loss.item() == pytest.approx((3 * -1.0 + 1 * 1.0) / 4)
        masked = MotionFieldLoss()(output, target, torch.tensor([0.0, 1.0], dtype=torch.float64))
        assert masked.item() == pytest.approx(1.0)

    def test_nothing_to_learn(self):
        output = torch.ones(2, 2, requires_grad=True)
        loss = MotionFieldLoss()(output, torch.zeros(2, 2))
        assert loss.item() == 0.0
        loss.backward()

    def test_invalid_eps(self):
        with pytest.raises(ValueError):
            MotionFieldLoss(eps=0.0)


class TestNormDirectionLoss:
    def test_perfect_prediction(self):
        assert baseline_norm_direction_loss(vec(1, 0), vec(1, 0)).item() == pytest.approx(-1.0)

    def test_wrong_norm(self):
        expected = math.log(1.1 / 2.1)**2 - 1
        assert baseline_norm_direction_loss(vec(1, 0), vec(2, 0), 0.1).item() == pytest.approx(expected, rel=1e-9)

    def test_orthogonal_direction(self):
        assert baseline_norm_direction_loss(vec(1, 0), vec(0, 1), 0.1).item() == pytest.approx(0.0, abs=1e-12)

    def test_module(self):
        output = torch.tensor([[1.0, 0.0]], dtype=torch.float64)
        assert NormDirectionLoss()(output, output).item() == pytest.approx(-1.0)


class TestAugmentation:
    def test_identity(self):
        rng = np.random.default_rng(0)
        coordinates = np.sort(rng.uniform(size=(50, 3)), axis=0)
        flows = rng.normal(size=(50, 2))
        cfg = AugmentationConfig(rotation=False, scale_range=(1.0, 1.0), sample_range=(1.0, 1.0))
        augmented, augmented_flows = augment(coordinates, flows, cfg, seed=0)
        np.testing.assert_array_equal(augmented, coordinates)
        np.testing.assert_array_equal(augmented_flows, flows)

    def test_quarter_rotation(self):
        np.testing.assert_allclose(rotate_events(np.array([[0.0, 1.0, 0.0]]), np.pi / 2), [[0.0, 0.0, -1.0]],
                                   atol=1e-15)
        np.testing.assert_allclose(rotate_flows(np.array([[1.0, 0.0]]), np.pi / 2), [[0.0, -1.0]], atol=1e-15)

    def test_rotation_round_trip(self):
        rng = np.random.default_rng(3)
        coordinates = rng.normal(size=(100, 3))
        flows = rng.normal(size=(100, 2))
        for theta in rng.uniform(-2 * np.pi, 2 * np.pi, size=10):
            np.testing.assert_allclose(rotate_events(rotate_events(coordinates, theta), -theta), coordinates, atol=1e-12)
            np.testing.assert_allclose(rotate_flows(rotate_flows(flows, theta), -theta), flows, atol=1e-12)

    def test_scaling_keeps_time(self):
        coordinates = np.array([[0.5, 0.2, -0.4]])
        np.testing.assert_allclose(scale_events(coordinates, 1.25), [[0.5, 0.25, -0.5]])

    def test_rotation_keeps_flow_relative_to_events(self):
        rng = np.random.default_rng(2)
        coordinates = rng.normal(size=(10, 3))
        flows = rng.normal(size=(10, 2))
        theta = 1.1
        dots = np.sum(coordinates[:, 1:] * flows, axis=1)
        rotated_dots = np.sum(rotate_events(coordinates, theta)[:, 1:] * rotate_flows(flows, theta), axis=1)
        np.testing.assert_allclose(rotated_dots, dots)

    def test_subsampling(self):
        indices = sample_events(100, 0.5, np.random.default_rng(0))
        assert len(indices) == 50
        assert np.all(np.diff(indices) > 0)
        assert len(sample_events(3, 0.01, np.random.default_rng(0))) == 1

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        coordinates = np.sort(rng.uniform(size=(40, 3)), axis=0)
        flows = rng.normal(size=(40, 2))
        first = augment(coordinates, flows, AugmentationConfig(), seed=5)
        second = augment(coordinates, flows, AugmentationConfig(), seed=5)
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first[1], second[1])
        assert len(first[0]) == len(first[1])

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            AugmentationConfig(sample_range=(0.5, 1.5))
        with pytest.raises(ValueError):
            augment(np.zeros((3, 3)), np.zeros((2, 2)), AugmentationConfig(), seed=0)
