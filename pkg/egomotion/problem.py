from dataclasses import dataclass, field

import numpy as np

from egomotion.motion_field import matrix_A, matrix_B
from utils.errors import DegenerateGeometry, InsufficientData

ZERO_DEROTATED_FLOW = 1e-8
MIN_OBSERVATIONS = 3


@dataclass
class NormalFlowObs:
    """
    Normal flow observations: pixel locations x (p, 2), unit normal flow directions g (p, 2) and
    normal flow magnitudes mag (p,), all in normalized camera coordinates.
    """
    x: np.ndarray
    g: np.ndarray
    mag: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64).reshape(-1, 2)
        self.g = np.asarray(self.g, dtype=np.float64).reshape(-1, 2)
        self.mag = np.asarray(self.mag, dtype=np.float64).reshape(-1)
        if not (len(self.x) == len(self.g) == len(self.mag)):
            raise ValueError('Observation arrays x, g and mag have different lengths')
        if np.any(np.abs(np.linalg.norm(self.g, axis=1) - 1.0) > 1e-9):
            raise ValueError('Normal flow directions have to be unit vectors')
        if np.any(self.mag < 0):
            raise ValueError('Normal flow magnitudes have to be non-negative')

    def __len__(self):
        return len(self.mag)

    def subset(self, indices) -> 'NormalFlowObs':
        return NormalFlowObs(self.x[indices], self.g[indices], self.mag[indices])

    @classmethod
    def from_normal_flow(cls, x, n_hat, min_norm: float = 1e-8) -> 'NormalFlowObs':
        """
        Splits normal flow vectors into direction and magnitude. Vectors shorter than `min_norm` are dropped.
        """
        x = np.asarray(x, dtype=np.float64).reshape(-1, 2)
        n_hat = np.asarray(n_hat, dtype=np.float64).reshape(-1, 2)
        mag = np.linalg.norm(n_hat, axis=1)
        keep = mag > min_norm
        return cls(x[keep], n_hat[keep] / mag[keep, None], mag[keep])


@dataclass
class EgoProblem:
    """
    Depth positivity classification problem: rows q = g^T A_x with labels sign(n_x).
    """
    Q: np.ndarray
    R: np.ndarray
    omega0: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __len__(self):
        return len(self.R)

    @property
    def labels(self) -> np.ndarray:
        return np.sign(self.R)

    def doubled(self):
        """
        The problem mirrored through the origin, (Q, sign R) joined with (-Q, -sign R). Both classes are present,
        which makes the classifier without intercept well posed.
        """
        features = np.concatenate([self.Q, -self.Q])
        labels = np.concatenate([self.labels, -self.labels])
        return features, labels

    def rho(self, V) -> np.ndarray:
        """
        Depth positivity products (q . V) n_x, positive for every row if V is the true translation.
        """
        return (self.Q @ np.asarray(V, dtype=np.float64)) * self.R


def derotate(obs: NormalFlowObs, omega0) -> np.ndarray:
    """
    Removes the rotational part of the normal flow: n_x = |n| - g^T B_x omega0.
    """
    rotational = np.einsum('...ij,j->...i', matrix_B(obs.x), np.asarray(omega0, dtype=np.float64))
    return obs.mag - np.sum(obs.g * rotational, axis=-1)


def build_problem(observations: NormalFlowObs, omega0) -> EgoProblem:
    omega0 = np.asarray(omega0, dtype=np.float64).reshape(3)
    n_x = derotate(observations, omega0)
    usable = np.abs(n_x) > ZERO_DEROTATED_FLOW
    if usable.sum() < MIN_OBSERVATIONS:
        raise InsufficientData(
            f'At least {MIN_OBSERVATIONS} observations with non-zero derotated flow are needed, got {int(usable.sum())}'
        )
    Q = np.einsum('pi,pij->pj', observations.g[usable], matrix_A(observations.x[usable]))
    if np.linalg.matrix_rank(Q) < 2:
        raise DegenerateGeometry('The observation rows span less than two dimensions')
    return EgoProblem(Q, n_x[usable], omega0)
