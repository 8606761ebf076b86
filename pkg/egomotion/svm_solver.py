from dataclasses import dataclass

import numpy as np
from sklearn.svm import LinearSVC

from egomotion.problem import EgoProblem
from egomotion.solver import TranslationEstimate, TranslationSolver, inlier_fraction
from utils.errors import ZeroSolution


@dataclass
class SVMConfig:
    lam: float = 1e-4
    max_iterations: int = 5000
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError('The regularization weight has to be positive')


def svm_objective(w, features, labels, lam) -> float:
    hinge = np.maximum(0.0, 1.0 - labels * (features @ w))
    return 0.5 * lam * float(w @ w) + float(hinge.mean())


def pegasos(features: np.ndarray, labels: np.ndarray, cfg: SVMConfig) -> np.ndarray:
    """
    Deterministic full batch Pegasos for the linear SVM without intercept:
    min_w lam/2 |w|^2 + mean(max(0, 1 - y (x . w))), step 1 / (lam t), projection onto the ball of radius 1/sqrt(lam).
    Returns the iterate with the lowest objective.
    """
    w = np.zeros(features.shape[1])
    radius = 1.0 / np.sqrt(cfg.lam)
    best_w, best_objective = w, np.inf
    for t in range(1, cfg.max_iterations + 2):
        margins = labels * (features @ w)
        objective = 0.5 * cfg.lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())
        if objective < best_objective:
            best_w, best_objective = w, objective
        if t > cfg.max_iterations:
            break

        active = margins < 1.0
        gradient = cfg.lam * w - (labels[active, None] * features[active]).sum(axis=0) / len(labels)
        if np.linalg.norm(gradient) < cfg.tolerance:
            break
        w = w - gradient / (cfg.lam * t)
        norm = np.linalg.norm(w)
        if norm > radius:
            w = w * (radius / norm)
    return best_w


class SVMSolver(TranslationSolver):
    """
    Recovers the translation direction as the normal of the maximum margin separating plane through the origin.
    """
    def __init__(self, cfg: SVMConfig = SVMConfig(), display_name='SVM'):
        super().__init__(display_name)
        self.cfg = cfg

    def fit(self, features, labels) -> np.ndarray:
        return pegasos(features, labels, self.cfg)

    def solve(self, problem: EgoProblem) -> TranslationEstimate:
        features, labels = problem.doubled()
        w = self.fit(features, labels)
        norm = np.linalg.norm(w)
        if norm < 1e-12:
            raise ZeroSolution('The classifier collapsed to the zero vector')
        V = w / norm
        return TranslationEstimate(V, inlier_fraction(problem, V))


class LiblinearSVMSolver(SVMSolver):
    """
    Same objective solved by liblinear. C = 1 / (lam m) rescales the mean hinge loss to liblinear's sum.
    """
    def __init__(self, cfg: SVMConfig = SVMConfig(), max_iter=100000, display_name='SVM (liblinear)'):
        super().__init__(cfg, display_name)
        self.max_iter = max_iter

    def fit(self, features, labels) -> np.ndarray:
        classifier = LinearSVC(
            C=1.0 / (self.cfg.lam * len(labels)),
            loss='hinge',
            fit_intercept=False,
            dual=True,
            tol=1e-8,
            max_iter=self.max_iter,
            random_state=0
        )
        classifier.fit(features, labels)
        return classifier.coef_.reshape(-1)


def solve_svm(problem: EgoProblem, cfg: SVMConfig = SVMConfig()) -> TranslationEstimate:
    return SVMSolver(cfg).solve(problem)
