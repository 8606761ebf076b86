from dataclasses import dataclass

import numpy as np

from utils.errors import NonConvergence


@dataclass(frozen=True)
class CameraModel:
    """
    Pinhole camera with Brown-Conrady distortion (three radial and two tangential coefficients).
    """
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError('Focal lengths have to be positive')
        if self.width <= 0 or self.height <= 0:
            raise ValueError('Image size has to be positive')

    def _distortion(self, normalized: np.ndarray):
        """
        Returns the distorted normalized coordinates and the 2x2 Jacobian of the distortion per point.
        """
        x, y = normalized[..., 0], normalized[..., 1]
        r2 = x * x + y * y
        radial = 1 + self.k1 * r2 + self.k2 * r2**2 + self.k3 * r2**3
        d_radial = self.k1 + 2 * self.k2 * r2 + 3 * self.k3 * r2**2  # d radial / d r2

        xd = x * radial + 2 * self.p1 * x * y + self.p2 * (r2 + 2 * x * x)
        yd = y * radial + self.p1 * (r2 + 2 * y * y) + 2 * self.p2 * x * y

        jac = np.empty(normalized.shape[:-1] + (2, 2))
        jac[..., 0, 0] = radial + 2 * x * x * d_radial + 2 * self.p1 * y + 6 * self.p2 * x
        jac[..., 0, 1] = 2 * x * y * d_radial + 2 * self.p1 * x + 2 * self.p2 * y
        jac[..., 1, 0] = 2 * x * y * d_radial + 2 * self.p1 * x + 2 * self.p2 * y
        jac[..., 1, 1] = radial + 2 * y * y * d_radial + 6 * self.p1 * y + 2 * self.p2 * x
        return np.stack([xd, yd], axis=-1), jac

    def distort(self, normalized) -> np.ndarray:
        """
        Forward model: undistorted normalized coordinates to raw pixel coordinates.
        """
        normalized = np.asarray(normalized, dtype=np.float64)
        distorted, _ = self._distortion(normalized)
        return np.stack([self.fx * distorted[..., 0] + self.cx, self.fy * distorted[..., 1] + self.cy], axis=-1)

    def undistort_normalize(self, px, max_iterations: int = 20, tolerance: float = 1e-10) -> np.ndarray:
        """
        Maps raw pixel coordinates of shape (..., 2) to undistorted normalized camera coordinates.
        The forward distortion is inverted with Newton iterations starting at the distorted coordinates.
        """
        px = np.asarray(px, dtype=np.float64)
        if not np.isfinite(px).all():
            raise ValueError('Pixel coordinates have to be finite')
        target = np.stack([(px[..., 0] - self.cx) / self.fx, (px[..., 1] - self.cy) / self.fy], axis=-1)
        if self.k1 == self.k2 == self.k3 == self.p1 == self.p2 == 0.0:
            return target

        estimate = target.copy()
        for _ in range(max_iterations):
            distorted, jac = self._distortion(estimate)
            step = np.linalg.solve(jac, (distorted - target)[..., None])[..., 0]
            estimate = estimate - step
            if np.abs(step).max() < tolerance:
                break

        distorted, _ = self._distortion(estimate)
        residual = np.abs(distorted - target).max()
        if not np.isfinite(residual) or residual > 1e-6:
            raise NonConvergence(
                f'Undistortion did not converge after {max_iterations} iterations (residual {residual:.3g})'
            )
        return estimate

    def contains(self, px) -> np.ndarray:
        px = np.asarray(px, dtype=np.float64)
        return (px[..., 0] >= 0) & (px[..., 0] <= self.width - 1) & (px[..., 1] >= 0) & (px[..., 1] <= self.height - 1)


def undistort_normalize(px, cam: CameraModel) -> np.ndarray:
    return cam.undistort_normalize(px)
