import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '../'))

import numpy as np
import pytest

from datasets.synthetic_scene import RigidMotion, SimWindow, random_scene, simulate
from egomotion.problem import NormalFlowObs
from events.camera import CameraModel


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long running accuracy and throughput checks, deselect with -m "not slow"')


@pytest.fixture
def identity_camera():
    return CameraModel(fx=1.0, fy=1.0, cx=0.0, cy=0.0, width=8, height=6)


@pytest.fixture
def distorted_camera():
    return CameraModel(fx=400.0, fy=420.0, cx=173.0, cy=130.0, width=346, height=260, k1=-0.2, p1=0.01)


def exact_observations(V, Omega, num_observations=3000, seed=0):
    """
    Ground truth normal flow of a dense random edge scene moving with (V, Omega).
    The short edges fill [-0.3, 0.3]^2, so every focus of expansion inside it is enclosed by edge lines.
    """
    edges = random_scene(seed, num_edges=1500, extent=0.3, length_range=(0.02, 0.06), events_per_length=100.0)
    recording = simulate(edges, RigidMotion(V, Omega), SimWindow(0.0, 0.01), seed=seed)
    usable = np.flatnonzero(np.linalg.norm(recording.normal_flows, axis=1) > 1e-6)
    rng = np.random.default_rng(seed)
    selected = np.sort(rng.choice(usable, size=min(num_observations, len(usable)), replace=False))
    x = recording.cloud.coordinates[selected, 1:]
    return NormalFlowObs.from_normal_flow(x, recording.normal_flows[selected])


@pytest.fixture
def forward_observations():
    return exact_observations(np.array([0.0, 0.0, 1.0]), np.array([0.1, -0.2, 0.3]))
