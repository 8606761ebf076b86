from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse
import torch
from scipy.spatial import cKDTree

from events.event_types import EventCloud

VKM_MAGIC = b'VKM1'


@dataclass(frozen=True)
class NeighborhoodSpec:
    """
    Radii of the ellipsoidal event neighborhood: time in seconds, space in normalized pixels.
    """
    dt: float = 0.02
    dx: float = 0.02
    dy: float = 0.02

    def __post_init__(self):
        if min(self.dt, self.dx, self.dy) <= 0:
            raise ValueError('Neighborhood radii have to be positive')

    @property
    def rotation_invariant(self) -> bool:
        """
        Rotations about the optical axis keep every neighborhood iff the spatial radii are equal.
        """
        return self.dx == self.dy

    def scale(self, coordinates: np.ndarray) -> np.ndarray:
        """
        Scales (t, x, y) coordinates of shape (N, 3) by the neighborhood radii.
        """
        return np.asarray(coordinates, dtype=np.float64) / np.array([self.dt, self.dx, self.dy])


@dataclass
class RandomProjection:
    """
    Fixed random matrix A of shape (3, d) with N(0, sigma2) entries.
    A is drawn from a counter based generator (Philox) so the seed alone reproduces it on any machine.
    """
    seed: int = 0
    d: int = 384
    sigma2: float = 25.0
    A: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError('Encoding dimension has to be positive')
        rng = np.random.Generator(np.random.Philox(self.seed))
        self.A = rng.normal(0.0, np.sqrt(self.sigma2), size=(3, self.d))


@dataclass
class Encoding:
    """
    Complex local event encoding G (N, d) with the number of neighbors of every event.
    """
    G: np.ndarray
    neighbor_counts: np.ndarray

    def __len__(self):
        return self.G.shape[0]

    @property
    def d(self) -> int:
        return self.G.shape[1]

    def as_real(self, dtype=np.float32) -> np.ndarray:
        """
        Concatenates real and imaginary parts into an (N, 2d) real array.
        """
        return np.concatenate([self.G.real, self.G.imag], axis=1).astype(dtype)

    def save(self, path):
        interleaved = np.empty((len(self), self.d, 2), dtype='<f4')
        interleaved[..., 0] = self.G.real
        interleaved[..., 1] = self.G.imag
        with open(path, 'wb') as f:
            f.write(VKM_MAGIC)
            f.write(np.uint64(len(self)).astype('<u8').tobytes())
            f.write(np.uint32(self.d).astype('<u4').tobytes())
            f.write(interleaved.tobytes())

    @classmethod
    def load(cls, path):
        with open(path, 'rb') as f:
            if f.read(4) != VKM_MAGIC:
                raise ValueError(f'{path} is not a VKM1 encoding file')
            n = int(np.frombuffer(f.read(8), dtype='<u8')[0])
            d = int(np.frombuffer(f.read(4), dtype='<u4')[0])
            values = np.frombuffer(f.read(n * d * 2 * 4), dtype='<f4').reshape(n, d, 2)
        G = values[..., 0].astype(np.float64) + 1j * values[..., 1].astype(np.float64)
        return cls(G, np.full(n, -1))


def neighborhood_distance2(coordinates: np.ndarray, i, j, spec: NeighborhoodSpec) -> np.ndarray:
    """
    Squared normalized distance between events i and j, evaluated directly on the raw (t, x, y) coordinates.
    """
    dt = (coordinates[i, 0] - coordinates[j, 0]) / spec.dt
    dx = (coordinates[i, 1] - coordinates[j, 1]) / spec.dx
    dy = (coordinates[i, 2] - coordinates[j, 2]) / spec.dy
    return dt**2 + dx**2 + dy**2


def build_adjacency(cloud: EventCloud, spec: NeighborhoodSpec) -> sparse.csr_matrix:
    """
    Sparse boolean adjacency J of the open ellipsoidal neighborhoods, including the diagonal.
    Candidate pairs come from a KD-tree on the scaled coordinates with a slightly enlarged radius,
    the strict inequality is then checked on the raw coordinates.
    """
    coordinates = cloud.coordinates
    n = len(cloud)
    tree = cKDTree(spec.scale(coordinates))
    pairs = tree.query_pairs(r=1.0 + 1e-9, output_type='ndarray')
    if len(pairs) > 0:
        inside = neighborhood_distance2(coordinates, pairs[:, 0], pairs[:, 1], spec) < 1.0
        pairs = pairs[inside]

    diagonal = np.arange(n)
    rows = np.concatenate([diagonal, pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([diagonal, pairs[:, 1], pairs[:, 0]])
    J = sparse.csr_matrix((np.ones(len(rows), dtype=bool), (rows, cols)), shape=(n, n))
    J.sort_indices()
    return J


def _torch_adjacency(adj: sparse.csr_matrix, dtype) -> torch.Tensor:
    return torch.sparse_csr_tensor(
        torch.from_numpy(adj.indptr.astype(np.int64)),
        torch.from_numpy(adj.indices.astype(np.int64)),
        torch.ones(adj.nnz, dtype=dtype),
        size=adj.shape
    )


def encode(
    cloud: EventCloud,
    adj: sparse.csr_matrix,
    proj: RandomProjection,
    spec: NeighborhoodSpec = NeighborhoodSpec(),
    block_size: int = 128,
    dtype=np.complex128
) -> Encoding:
    """
    G = normalize((J exp(iXA)) ./ exp(iXA)) on the neighborhood scaled coordinates X.
    The neighborhood sums run as a threaded sparse product on the real pair (cos XA, sin XA) in the real
    precision of `dtype` (complex64 or complex128). The features are processed in column blocks to bound
    memory for large clouds.
    """
    if adj.shape != (len(cloud), len(cloud)):
        raise ValueError(f'Adjacency of shape {adj.shape} does not match {len(cloud)} events')
    real_dtype = np.float32 if np.dtype(dtype) == np.complex64 else np.float64
    X = spec.scale(cloud.coordinates)
    J = _torch_adjacency(adj, torch.float32 if real_dtype == np.float32 else torch.float64)
    G = np.empty((len(cloud), proj.d), dtype=dtype)
    for start in range(0, proj.d, block_size):
        stop = min(start + block_size, proj.d)
        phases = X @ proj.A[:, start:stop]
        cos, sin = np.cos(phases).astype(real_dtype), np.sin(phases).astype(real_dtype)
        summed = torch.sparse.mm(J, torch.from_numpy(np.concatenate([cos, sin], axis=1))).numpy()
        cos_sum, sin_sum = summed[:, :stop - start], summed[:, stop - start:]
        # (C + iS) * conj(c + is) with C, S the neighborhood sums
        G[:, start:stop] = (cos_sum * cos + sin_sum * sin) + 1j * (sin_sum * cos - cos_sum * sin)

    G /= np.linalg.norm(G, axis=1, keepdims=True)
    return Encoding(G, np.diff(adj.indptr))


def reconstruct_density(row: np.ndarray, proj: RandomProjection, grid: np.ndarray) -> np.ndarray:
    """
    Kernel mixture density estimate of one encoded neighborhood at relative, neighborhood scaled points (M, 3).
    """
    grid = np.asarray(grid, dtype=np.float64).reshape(-1, 3)
    basis = np.exp(1j * (grid @ proj.A))
    return np.real(np.conj(basis) @ np.asarray(row)) / proj.d


class VecKMEncoder:
    """
    Bundles neighborhood radii and random projection into a reusable cloud encoder.
    Encodings are computed in single precision unless another complex dtype is given.
    """
    def __init__(self, spec: NeighborhoodSpec = NeighborhoodSpec(), proj: RandomProjection = None, dtype=np.complex64):
        self.spec = spec
        self.proj = proj if proj is not None else RandomProjection()
        self.dtype = dtype

    @property
    def d(self):
        return self.proj.d

    def adjacency(self, cloud: EventCloud) -> sparse.csr_matrix:
        return build_adjacency(cloud, self.spec)

    def __call__(self, cloud: EventCloud, adj: sparse.csr_matrix = None) -> Encoding:
        adj = adj if adj is not None else build_adjacency(cloud, self.spec)
        return encode(cloud, adj, self.proj, self.spec, dtype=self.dtype)
