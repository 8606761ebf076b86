import numpy as np


def matrix_A(x) -> np.ndarray:
    """
    Translational motion field matrix for normalized image points of shape (..., 2).
    Returns an array of shape (..., 2, 3).
    """
    x = np.asarray(x, dtype=np.float64)
    A = np.zeros(x.shape[:-1] + (2, 3))
    A[..., 0, 0] = -1.0
    A[..., 1, 1] = -1.0
    A[..., 0, 2] = x[..., 0]
    A[..., 1, 2] = x[..., 1]
    return A


def matrix_B(x) -> np.ndarray:
    """
    Rotational motion field matrix for normalized image points of shape (..., 2).
    Returns an array of shape (..., 2, 3).
    """
    x = np.asarray(x, dtype=np.float64)
    px, py = x[..., 0], x[..., 1]
    B = np.empty(x.shape[:-1] + (2, 3))
    B[..., 0, 0] = px * py
    B[..., 0, 1] = -(px * px + 1)
    B[..., 0, 2] = py
    B[..., 1, 0] = py * py + 1
    B[..., 1, 1] = -px * py
    B[..., 1, 2] = -px
    return B


def motion_field_jacobian(x, Z, V, Omega) -> np.ndarray:
    """
    Spatial Jacobian d(flow)/d(x, y) of the instantaneous motion field at constant depth, shape (..., 2, 2).
    """
    x = np.asarray(x, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    wx, wy, wz = Omega
    px, py = x[..., 0], x[..., 1]
    jac = np.empty(x.shape[:-1] + (2, 2))
    jac[..., 0, 0] = V[2] / Z + py * wx - 2 * px * wy
    jac[..., 0, 1] = px * wx + wz
    jac[..., 1, 0] = -py * wy - wz
    jac[..., 1, 1] = V[2] / Z + 2 * py * wx - px * wy
    return jac
