from abc import abstractmethod
from dataclasses import dataclass

import numpy as np

from egomotion.problem import EgoProblem, NormalFlowObs, build_problem


@dataclass
class TranslationEstimate:
    """
    Unit translation direction with the fraction of depth positivity constraints it satisfies.
    """
    V: np.ndarray
    inlier_fraction: float

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=np.float64).reshape(3)
        norm = np.linalg.norm(self.V)
        if abs(norm - 1.0) > 1e-9:
            self.V = self.V / norm


def inlier_fraction(problem: EgoProblem, V) -> float:
    return float(np.mean(problem.rho(V) > 0))


def angle_between(V1, V2) -> float:
    """
    Angle in degrees between two translation directions.
    """
    V1 = np.asarray(V1, dtype=np.float64)
    V2 = np.asarray(V2, dtype=np.float64)
    cosine = V1 @ V2 / (np.linalg.norm(V1) * np.linalg.norm(V2))
    return float(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))


class TranslationSolver:
    """
    The base class for all translation direction solvers working on derotated normal flow.
    """
    def __init__(self, display_name: str = ''):
        self.display_name = display_name

    @abstractmethod
    def solve(self, problem: EgoProblem) -> TranslationEstimate:
        raise NotImplementedError('This function has to be implemented in a subclass')

    def estimate(self, observations: NormalFlowObs, omega0) -> TranslationEstimate:
        return self.solve(build_problem(observations, omega0))

    def __call__(self, observations: NormalFlowObs, omega0) -> TranslationEstimate:
        return self.estimate(observations, omega0)
