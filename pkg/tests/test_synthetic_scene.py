import numpy as np
import pytest

from datasets.synthetic_scene import (RigidMotion, SceneEdge, SimWindow, gt_normal_flow, motion_field, random_motion,
                                      random_scene, read_scene, rotate_scene, simulate, synthetic_recordings,
                                      write_scene)
from metrics.flow_metrics import pee
from utils.errors import EmptyScene, NonPositiveDepth, ParseError, UsageError


def horizontal_edge(depth=1.0):
    return SceneEdge((-0.1, 0.05), (0.1, 0.05), depth, 200.0)


class TestMotionField:
    def test_forward_translation(self):
        u = motion_field(np.array([0.1, 0.2]), 1.0, RigidMotion([0, 0, 1], [0, 0, 0]))
        np.testing.assert_allclose(u, [0.1, 0.2])

    def test_roll_at_principal_point(self):
        u = motion_field(np.array([0.0, 0.0]), 1.0, RigidMotion([0, 0, 0], [0, 0, 1]))
        np.testing.assert_allclose(u, [0.0, 0.0])

    def test_pitch_at_principal_point(self):
        u = motion_field(np.array([0.0, 0.0]), 1.0, RigidMotion([0, 0, 0], [1, 0, 0]))
        np.testing.assert_allclose(u, [0.0, 1.0])

    def test_non_positive_depth(self):
        with pytest.raises(NonPositiveDepth):
            motion_field(np.array([0.0, 0.0]), 0.0, RigidMotion([0, 0, 1]))


class TestNormalFlow:
    def test_flow_normal_to_edge(self):
        np.testing.assert_allclose(gt_normal_flow([1.0, 0.0], [0.0, 1.0]), [1.0, 0.0])

    def test_flow_along_edge(self):
        np.testing.assert_allclose(gt_normal_flow([1.0, 0.0], [1.0, 0.0]), [0.0, 0.0])

    def test_diagonal_edges(self):
        along = np.array([1.0, 1.0]) / np.sqrt(2)
        across = np.array([1.0, -1.0]) / np.sqrt(2)
        np.testing.assert_allclose(gt_normal_flow([1.0, 1.0], along), [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(gt_normal_flow([1.0, 1.0], across), [1.0, 1.0])

    def test_edge_direction_has_to_be_unit(self):
        with pytest.raises(ValueError):
            gt_normal_flow([1.0, 0.0], [2.0, 0.0])


class TestSimulate:
    def test_static_scene(self):
        recording = simulate([horizontal_edge()], RigidMotion(), SimWindow(0.0, 0.01))
        assert len(recording) == 400
        np.testing.assert_array_equal(recording.flows, 0.0)
        np.testing.assert_array_equal(recording.normal_flows, 0.0)

    def test_inverse_depth_scaling(self):
        motion = RigidMotion([1.0, 0.0, 0.0])
        near = simulate([horizontal_edge(1.0)], motion, SimWindow(0.0, 0.02), seed=3)
        far = simulate([horizontal_edge(2.0)], motion, SimWindow(0.0, 0.02), seed=3)
        np.testing.assert_array_equal(near.flows, 2 * far.flows)

    def test_deterministic(self):
        edges = random_scene(5)
        motion = random_motion(5)
        first = simulate(edges, motion, SimWindow(0.0, 0.05), seed=7)
        second = simulate(edges, motion, SimWindow(0.0, 0.05), seed=7)
        np.testing.assert_array_equal(first.cloud.coordinates, second.cloud.coordinates)
        np.testing.assert_array_equal(first.flows, second.flows)
        np.testing.assert_array_equal(first.normal_flows, second.normal_flows)

    def test_ground_truth_is_consistent(self):
        recording = simulate(random_scene(2), random_motion(2), SimWindow(0.0, 0.05), seed=2)
        assert np.all(np.diff(recording.cloud.t) >= 0)
        assert np.all(recording.depths > 0)
        usable = np.linalg.norm(recording.normal_flows, axis=1) > 1e-6
        errors = pee(recording.flows[usable], recording.normal_flows[usable])
        np.testing.assert_allclose(errors, 0.0, atol=1e-9)

    def test_events_inside_window(self):
        recording = simulate([horizontal_edge()], RigidMotion([0, 0, 1]), SimWindow(0.1, 0.15))
        assert recording.cloud.t.min() >= 0.1
        assert recording.cloud.t.max() < 0.15

    def test_empty_scene(self):
        with pytest.raises(EmptyScene):
            simulate([], RigidMotion(), SimWindow())

    def test_rotated_scene_rotates_flows(self):
        edges, motion = random_scene(1), RigidMotion([0.3, -0.2, 1.0], [0, 0, 0])
        rotated_edges, rotated_motion = rotate_scene(edges, motion, 0.7)
        original = simulate(edges, motion, SimWindow(0.0, 0.005), seed=1)
        rotated = simulate(rotated_edges, rotated_motion, SimWindow(0.0, 0.005), seed=1)
        c, s = np.cos(0.7), np.sin(0.7)
        R = np.array([[c, -s], [s, c]])
        np.testing.assert_allclose(rotated.flows, original.flows @ R.T, atol=1e-12)
        np.testing.assert_allclose(rotated.normal_flows, original.normal_flows @ R.T, atol=1e-12)

    def test_synthetic_recordings(self):
        recordings = synthetic_recordings(2, seed=4, window=SimWindow(0.0, 0.02))
        assert len(recordings) == 2
        assert not np.array_equal(recordings[0].flows[:10], recordings[1].flows[:10])


class TestSceneFile:
    def test_round_trip(self, tmp_path):
        edges = random_scene(0, num_edges=5)
        write_scene(tmp_path / 'edges.txt', edges)
        loaded = read_scene(tmp_path / 'edges.txt')
        assert len(loaded) == 5
        for edge, other in zip(edges, loaded):
            np.testing.assert_array_equal(edge.p0, other.p0)
            np.testing.assert_array_equal(edge.p1, other.p1)
            assert edge.depth == other.depth

    def test_comments_and_blank_lines(self, tmp_path):
        (tmp_path / 'edges.txt').write_text('# scene\n\n0 0 0.1 0 1.5 100  # edge\n')
        edges = read_scene(tmp_path / 'edges.txt')
        assert len(edges) == 1
        assert edges[0].depth == 1.5

    def test_parse_error_line_number(self, tmp_path):
        (tmp_path / 'edges.txt').write_text('0 0 0.1 0 1 100\n0 0 0.1\n')
        with pytest.raises(ParseError) as e:
            read_scene(tmp_path / 'edges.txt')
        assert e.value.line_number == 2

    def test_negative_depth(self, tmp_path):
        (tmp_path / 'edges.txt').write_text('0 0 0.1 0 -1 100\n')
        with pytest.raises(ParseError):
            read_scene(tmp_path / 'edges.txt')

    def test_missing_file(self, tmp_path):
        with pytest.raises(UsageError):
            read_scene(tmp_path / 'missing.txt')

    def test_empty_file(self, tmp_path):
        (tmp_path / 'edges.txt').write_text('# nothing\n')
        with pytest.raises(EmptyScene):
            read_scene(tmp_path / 'edges.txt')
