import itertools
from dataclasses import dataclass

import numpy as np

from egomotion.problem import EgoProblem, NormalFlowObs
from egomotion.solver import TranslationEstimate, TranslationSolver, inlier_fraction


@dataclass
class NegativeDepthConfig:
    iterations: int = 600
    step: float = 0.2
    decay: float = 0.99


def initial_directions() -> np.ndarray:
    """
    The 26 normalized directions of {-1, 0, 1}^3 without the origin: the face, edge and corner directions of a cube.
    They replace the vertices of an icosphere, which no subdivision level brings to exactly 26. The largest angle
    from any unit vector to its nearest start is below 35 degrees.
    """
    directions = np.array([d for d in itertools.product((-1, 0, 1), repeat=3) if any(d)], dtype=np.float64)
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def negative_depth_loss(problem: EgoProblem, V) -> float:
    """
    Mean of ReLU(-rho(V)) over all observations.
    """
    return float(np.maximum(0.0, -problem.rho(V)).mean())


def _loss_gradient(problem: EgoProblem, V) -> np.ndarray:
    violated = problem.rho(V) < 0
    return -(problem.R[violated, None] * problem.Q[violated]).sum(axis=0) / len(problem)


class NegativeDepthSolver(TranslationSolver):
    """
    Baseline minimizing the negative depth products on the unit sphere with projected gradient descent
    from 26 starting directions; the direction with the lowest loss wins.
    """
    def __init__(self, cfg: NegativeDepthConfig = NegativeDepthConfig(), display_name='Negative depth'):
        super().__init__(display_name)
        self.cfg = cfg

    def descend(self, problem: EgoProblem, V: np.ndarray):
        best_V, best_loss = V, negative_depth_loss(problem, V)
        step = self.cfg.step
        for _ in range(self.cfg.iterations):
            gradient = _loss_gradient(problem, V)
            tangential = gradient - (gradient @ V) * V
            norm = np.linalg.norm(tangential)
            if norm < 1e-15:
                break
            V = V - step * tangential / norm
            V = V / np.linalg.norm(V)
            step *= self.cfg.decay

            loss = negative_depth_loss(problem, V)
            if loss < best_loss:
                best_V, best_loss = V, loss
        return best_V, best_loss

    def solve(self, problem: EgoProblem) -> TranslationEstimate:
        best_V, best_loss = None, np.inf
        for start in initial_directions():
            V, loss = self.descend(problem, start)
            if loss < best_loss:
                best_V, best_loss = V, loss
        return TranslationEstimate(best_V, inlier_fraction(problem, best_V))


def solve_negative_depth(
    observations: NormalFlowObs, omega0, cfg: NegativeDepthConfig = NegativeDepthConfig()
) -> TranslationEstimate:
    return NegativeDepthSolver(cfg).estimate(observations, omega0)
