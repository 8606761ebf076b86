import math
import os
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from egomotion.motion_field import matrix_A, matrix_B, motion_field_jacobian
from events.event_types import EventCloud, Recording
from utils.errors import EmptyScene, NonPositiveDepth, ParseError, UsageError

MAX_INTEGRATION_STEP = 1e-3


@dataclass
class RigidMotion:
    """
    Camera motion: translation V and angular velocity Omega (rad/s) in camera coordinates.
    """
    V: np.ndarray = field(default_factory=lambda: np.zeros(3))
    Omega: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=np.float64).reshape(3)
        self.Omega = np.asarray(self.Omega, dtype=np.float64).reshape(3)
        if not (np.isfinite(self.V).all() and np.isfinite(self.Omega).all()):
            raise ValueError('Rigid motion has to be finite')

    @property
    def direction(self) -> np.ndarray:
        norm = np.linalg.norm(self.V)
        return self.V / norm if norm > 0 else self.V

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.V))


@dataclass
class SceneEdge:
    """
    Straight edge segment in normalized image coordinates at constant depth (meters).
    """
    p0: np.ndarray
    p1: np.ndarray
    depth: float
    events_per_length: float = 200.0

    def __post_init__(self):
        self.p0 = np.asarray(self.p0, dtype=np.float64).reshape(2)
        self.p1 = np.asarray(self.p1, dtype=np.float64).reshape(2)
        if self.depth <= 0:
            raise NonPositiveDepth(f'Edge depth has to be positive, got {self.depth}')
        if np.array_equal(self.p0, self.p1):
            raise ValueError('Edge endpoints have to differ')
        if self.events_per_length <= 0:
            raise ValueError('Edge event density has to be positive')

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))

    @property
    def direction(self) -> np.ndarray:
        return (self.p1 - self.p0) / self.length


@dataclass
class SimWindow:
    t_start: float = 0.0
    t_end: float = 0.5
    slice: float = 0.02

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError('Simulation window end has to be after its start')
        if self.t_start < 0:
            raise ValueError('Simulation window has to start at a non-negative time')

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


def motion_field(x, Z, m: RigidMotion) -> np.ndarray:
    """
    Instantaneous optical flow at normalized image points x (..., 2) with depth Z:
    (1 / Z) * A_x V + B_x Omega.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if np.any(Z <= 0):
        raise NonPositiveDepth('Depth has to be positive for the motion field')
    translational = np.einsum('...ij,j->...i', matrix_A(x), m.V) / Z[..., None]
    rotational = np.einsum('...ij,j->...i', matrix_B(x), m.Omega)
    return translational + rotational


def gt_normal_flow(u, edge_dir) -> np.ndarray:
    """
    Projects the optical flow onto the unit normal of the edge direction.
    """
    u = np.asarray(u, dtype=np.float64)
    edge_dir = np.asarray(edge_dir, dtype=np.float64)
    if np.any(np.abs(np.linalg.norm(edge_dir, axis=-1) - 1.0) > 1e-9):
        raise ValueError('Edge direction has to be a unit vector')
    normal = np.stack([-edge_dir[..., 1], edge_dir[..., 0]], axis=-1)
    return np.sum(u * normal, axis=-1, keepdims=True) * normal


def simulate(edges: Sequence[SceneEdge], m: RigidMotion, w: SimWindow, seed: int = 0) -> Recording:
    """
    Generates events along the given edges while the camera moves with the rigid motion `m`.
    Every point sampled on an edge is transported along the motion field with Euler steps of at most 1 ms and
    emits one event per step. Each event carries the exact optical flow, normal flow and depth.
    """
    if len(edges) == 0:
        raise EmptyScene('The scene does not contain any edge')
    rng = np.random.default_rng(seed)

    positions, tangents, depths = [], [], []
    for edge in edges:
        num_points = max(2, int(round(edge.length * edge.events_per_length)))
        s = (np.arange(num_points) + 0.5) / num_points
        positions.append(edge.p0[None, :] + s[:, None] * (edge.p1 - edge.p0)[None, :])
        tangents.append(np.repeat(edge.direction[None, :], num_points, axis=0))
        depths.append(np.full(num_points, edge.depth))
    pos = np.concatenate(positions)
    tangent = np.concatenate(tangents)
    depth = np.concatenate(depths)

    num_steps = max(1, math.ceil(w.duration / MAX_INTEGRATION_STEP - 1e-9))
    step = w.duration / num_steps

    t_out, pos_out, flow_out, normal_out, polarity_out = [], [], [], [], []
    for k in range(num_steps):
        flow = motion_field(pos, depth, m)
        jitter = rng.random(len(pos))
        t_out.append(w.t_start + (k + jitter) * step)
        pos_out.append(pos)
        flow_out.append(flow)
        normal_out.append(gt_normal_flow(flow, tangent))
        # ON events where the edge moves along its left normal
        normal_speed = flow[:, 1] * tangent[:, 0] - flow[:, 0] * tangent[:, 1]
        polarity_out.append(np.where(normal_speed >= 0, 1, -1).astype(np.int8))

        jac = motion_field_jacobian(pos, depth, m.V, m.Omega)
        tangent = tangent + step * np.einsum('nij,nj->ni', jac, tangent)
        tangent = tangent / np.linalg.norm(tangent, axis=1, keepdims=True)
        pos = pos + step * flow

    t = np.concatenate(t_out)
    order = np.argsort(t, kind='stable')
    xy = np.concatenate(pos_out)[order]
    flows = np.concatenate(flow_out)[order]
    normal_flows = np.concatenate(normal_out)[order]
    depths = np.tile(depth, num_steps)[order]
    polarity = np.concatenate(polarity_out)[order]

    cloud = EventCloud(t[order], xy[:, 0], xy[:, 1], polarity)
    return Recording(cloud, flows, normal_flows, depths)


def rotate_scene(edges: Sequence[SceneEdge], m: RigidMotion, theta: float):
    """
    Rotates the scene about the optical axis by theta, together with the x/y components of the motion.
    """
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    rotated_edges = [SceneEdge(R @ e.p0, R @ e.p1, e.depth, e.events_per_length) for e in edges]
    V = np.concatenate([R @ m.V[:2], m.V[2:]])
    Omega = np.concatenate([R @ m.Omega[:2], m.Omega[2:]])
    return rotated_edges, RigidMotion(V, Omega)


def random_scene(
    seed: int,
    num_edges: int = 8,
    corner_fraction: float = 0.5,
    extent: float = 0.5,
    length_range=(0.05, 0.2),
    depth_range=(1.0, 4.0),
    events_per_length: float = 200.0
) -> List[SceneEdge]:
    """
    Random scene of straight edges and two-segment corners inside [-extent, extent]^2.
    A corner counts as two edges.
    """
    rng = np.random.default_rng(seed)
    edges = []
    while len(edges) < num_edges:
        center = rng.uniform(-extent, extent, size=2)
        depth = rng.uniform(*depth_range)
        angle = rng.uniform(0, 2 * np.pi)
        length = rng.uniform(*length_range)
        direction = np.array([np.cos(angle), np.sin(angle)])
        if num_edges - len(edges) >= 2 and rng.random() < corner_fraction:
            opening = rng.uniform(np.pi / 4, 3 * np.pi / 4)
            second = np.array([np.cos(angle + opening), np.sin(angle + opening)])
            edges.append(SceneEdge(center, center + length * direction, depth, events_per_length))
            edges.append(SceneEdge(center, center + length * second, depth, events_per_length))
        else:
            edges.append(
                SceneEdge(center - 0.5 * length * direction, center + 0.5 * length * direction, depth,
                          events_per_length)
            )
    return edges


def random_motion(seed: int, max_rotation: float = 0.5, forward_bias: bool = True) -> RigidMotion:
    """
    Random unit translation direction with a bounded angular velocity.
    """
    rng = np.random.default_rng(seed)
    V = rng.normal(size=3)
    if forward_bias:
        V[2] = abs(V[2])
    V = V / np.linalg.norm(V)
    Omega = rng.uniform(-max_rotation, max_rotation, size=3)
    return RigidMotion(V, Omega)


def synthetic_recordings(
    num_scenes: int,
    seed: int = 0,
    window: SimWindow = None,
    num_edges: int = 8,
    events_per_length: float = 200.0,
    max_rotation: float = 0.5
) -> List[Recording]:
    """
    Simulates `num_scenes` independent random scenes, each with its own random motion.
    """
    window = window if window is not None else SimWindow()
    recordings = []
    for i in range(num_scenes):
        edges = random_scene([seed, i, 0], num_edges=num_edges, events_per_length=events_per_length)
        motion = random_motion([seed, i, 1], max_rotation=max_rotation)
        recordings.append(simulate(edges, motion, window, seed=[seed, i, 2]))
    return recordings


def read_scene(path) -> List[SceneEdge]:
    """
    Reads a scene file with one edge per line: `x0 y0 x1 y1 depth density`.
    """
    if not os.path.isfile(path):
        raise UsageError(f'Scene file not found: {path}')
    edges = []
    with open(path) as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split('#')[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 6:
                raise ParseError(path, line_number, f'expected 6 values "x0 y0 x1 y1 depth density", got {len(fields)}')
            try:
                x0, y0, x1, y1, depth, density = [float(v) for v in fields]
            except ValueError:
                raise ParseError(path, line_number, f'invalid number in "{line}"')
            try:
                edges.append(SceneEdge((x0, y0), (x1, y1), depth, density))
            except (ValueError, NonPositiveDepth) as e:
                raise ParseError(path, line_number, str(e))
    if not edges:
        raise EmptyScene(f'Scene file {path} does not contain any edge')
    return edges


def write_scene(path, edges: Sequence[SceneEdge]):
    with open(path, 'w') as f:
        for e in edges:
            f.write(f'{float(e.p0[0])!r} {float(e.p0[1])!r} {float(e.p1[0])!r} {float(e.p1[1])!r} {float(e.depth)!r} {float(e.events_per_length)!r}\n')
