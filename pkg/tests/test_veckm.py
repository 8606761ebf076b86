import numpy as np
import pytest

from datasets.augmentation import rotate_events
from events.event_types import EventCloud
from models.veckm import (Encoding, NeighborhoodSpec, RandomProjection, VecKMEncoder, build_adjacency, encode,
                          neighborhood_distance2, reconstruct_density)


@pytest.fixture
def random_cloud():
    rng = np.random.default_rng(0)
    t = np.sort(rng.uniform(0, 0.05, 500))
    return EventCloud(t, rng.uniform(-0.1, 0.1, 500), rng.uniform(-0.1, 0.1, 500))


@pytest.fixture
def projection():
    return RandomProjection(seed=0, d=384)


class TestRandomProjection:
    def test_seed_reproduces_matrix(self):
        np.testing.assert_array_equal(RandomProjection(seed=3).A, RandomProjection(seed=3).A)
        assert not np.array_equal(RandomProjection(seed=3).A, RandomProjection(seed=4).A)

    def test_shape_and_scale(self):
        proj = RandomProjection(seed=0, d=4096, sigma2=25.0)
        assert proj.A.shape == (3, 4096)
        assert np.std(proj.A) == pytest.approx(5.0, rel=0.05)

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            RandomProjection(d=0)


class TestAdjacency:
    def test_boundary_is_excluded(self):
        cloud = EventCloud([0.0, 0.02], [0.0, 0.0], [0.0, 0.0])
        adjacency = build_adjacency(cloud, NeighborhoodSpec())
        assert not adjacency[0, 1]
        assert not adjacency[1, 0]

    def test_half_radius_is_symmetric(self):
        cloud = EventCloud([0.0, 0.01], [0.0, 0.0], [0.0, 0.0])
        adjacency = build_adjacency(cloud, NeighborhoodSpec())
        assert adjacency[0, 1] and adjacency[1, 0]
        assert adjacency[0, 0] and adjacency[1, 1]

    def test_matches_all_pairs(self, random_cloud):
        spec = NeighborhoodSpec()
        adjacency = build_adjacency(random_cloud, spec).toarray()
        i, j = np.meshgrid(np.arange(500), np.arange(500), indexing='ij')
        expected = neighborhood_distance2(random_cloud.coordinates, i, j, spec) < 1.0
        np.testing.assert_array_equal(adjacency, expected)

    def test_matches_all_pairs_on_random_clouds(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 2001))
            extent = rng.uniform(0.02, 0.3)
            spec = NeighborhoodSpec(*rng.uniform(0.005, 0.03, size=3))
            cloud = EventCloud(
                np.sort(rng.uniform(0, 0.1, n)), rng.uniform(-extent, extent, n), rng.uniform(-extent, extent, n)
            )
            index = np.arange(n)
            expected = neighborhood_distance2(cloud.coordinates, index[:, None], index[None, :], spec) < 1.0
            np.testing.assert_array_equal(build_adjacency(cloud, spec).toarray(), expected)

    def test_rotation_invariance_needs_equal_radii(self):
        assert NeighborhoodSpec().rotation_invariant
        assert not NeighborhoodSpec(dx=0.01, dy=0.02).rotation_invariant

    def test_anisotropic_radii(self):
        spec = NeighborhoodSpec(dt=0.02, dx=0.01, dy=0.04)
        cloud = EventCloud([0.0, 0.0, 0.0], [0.0, 0.015, 0.0], [0.0, 0.0, 0.03])
        adjacency = build_adjacency(cloud, spec).toarray()
        assert not adjacency[0, 1]
        assert adjacency[0, 2]

    def test_invalid_radii(self):
        with pytest.raises(ValueError):
            NeighborhoodSpec(dt=0.0)


class TestEncode:
    def test_singleton_row(self, projection):
        cloud = EventCloud([0.0, 1.0], [0.0, 0.0], [0.0, 0.0])
        encoding = encode(cloud, build_adjacency(cloud, NeighborhoodSpec()), projection)
        np.testing.assert_allclose(encoding.G[0], np.full(384, 1 / np.sqrt(384)), atol=1e-12)
        np.testing.assert_array_equal(encoding.neighbor_counts, [1, 1])

    def test_unit_rows(self, random_cloud, projection):
        encoding = VecKMEncoder(NeighborhoodSpec(), projection, dtype=np.complex128)(random_cloud)
        np.testing.assert_allclose(np.linalg.norm(encoding.G, axis=1), 1.0, atol=1e-12)
        assert np.isfinite(encoding.G).all()

    def test_translation_invariance(self, random_cloud, projection):
        encoder = VecKMEncoder(NeighborhoodSpec(), projection, dtype=np.complex128)
        shifted = EventCloud.from_coordinates(random_cloud.coordinates + np.array([0.01, 0.05, -0.03]))
        np.testing.assert_allclose(encoder(shifted).G, encoder(random_cloud).G, atol=1e-12)

    def test_permutation_equivariance(self, random_cloud, projection):
        encoder = VecKMEncoder(NeighborhoodSpec(), projection, dtype=np.complex128)
        permutation = np.random.default_rng(1).permutation(500)
        permuted = EventCloud.from_coordinates(random_cloud.coordinates[permutation], check_sorted=False)
        np.testing.assert_allclose(encoder(permuted).G, encoder(random_cloud).G[permutation], atol=1e-12)

    def test_single_precision_matches_double(self, random_cloud, projection):
        single = VecKMEncoder(NeighborhoodSpec(), projection)(random_cloud)
        double = VecKMEncoder(NeighborhoodSpec(), projection, dtype=np.complex128)(random_cloud)
        assert single.G.dtype == np.complex64
        np.testing.assert_allclose(single.G, double.G, atol=1e-5)

    def test_shared_adjacency_under_rotation(self, random_cloud, projection):
        encoder = VecKMEncoder(NeighborhoodSpec(), projection, dtype=np.complex128)
        rotated = EventCloud.from_coordinates(rotate_events(random_cloud.coordinates, 1.1))
        shared = encoder(rotated, encoder.adjacency(random_cloud))
        np.testing.assert_allclose(shared.G, encoder(rotated).G, atol=1e-12)

    def test_adjacency_shape_mismatch(self, random_cloud, projection):
        cloud = EventCloud([0.0], [0.0], [0.0])
        with pytest.raises(ValueError):
            encode(random_cloud, build_adjacency(cloud, NeighborhoodSpec()), projection)

    def test_real_view(self, random_cloud, projection):
        encoding = VecKMEncoder(NeighborhoodSpec(), projection)(random_cloud)
        real = encoding.as_real()
        assert real.shape == (500, 768)
        np.testing.assert_allclose(real[:, 384:], encoding.G.imag, atol=1e-7)

    def test_encoding_file(self, tmp_path, random_cloud, projection):
        encoding = VecKMEncoder(NeighborhoodSpec(), projection)(random_cloud)
        encoding.save(tmp_path / 'encoding.vkm')
        loaded = Encoding.load(tmp_path / 'encoding.vkm')
        np.testing.assert_allclose(loaded.G, encoding.G, atol=1e-7)


class TestDensity:
    def test_singleton_peak_at_origin(self, projection):
        row = np.full(384, 1 / np.sqrt(384), dtype=np.complex128)
        axis = np.linspace(-1, 1, 21)
        grid = np.stack(np.meshgrid(axis, axis, axis, indexing='ij'), axis=-1).reshape(-1, 3)
        density = reconstruct_density(row, projection, grid)
        np.testing.assert_allclose(grid[np.argmax(density)], [0.0, 0.0, 0.0], atol=1e-12)

    def test_two_neighbors(self, projection):
        offsets = np.array([[0.0, 0.3, 0.0], [0.0, -0.3, 0.0]])
        row = np.exp(1j * offsets @ projection.A).sum(axis=0)
        row /= np.linalg.norm(row)
        axis = np.linspace(0.0, 1.0, 101)
        positive = np.stack([np.zeros(101), axis, np.zeros(101)], axis=1)
        negative = positive * np.array([1.0, -1.0, 1.0])
        assert abs(axis[np.argmax(reconstruct_density(row, projection, positive))] - 0.3) < 0.1
        assert abs(axis[np.argmax(reconstruct_density(row, projection, negative))] - 0.3) < 0.1

        far = reconstruct_density(row, projection, [[0.0, 2.0, 0.0]])[0]
        peak = reconstruct_density(row, projection, [[0.0, 0.3, 0.0]])[0]
        assert abs(far) < 0.2 * peak
