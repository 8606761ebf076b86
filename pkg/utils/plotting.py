import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import hsv_to_rgb
from PIL import Image

from models.veckm import RandomProjection, reconstruct_density
from utils.errors import EmptyPredictions

INVALID_GRAY = 0.5


def flow_to_rgb(n_hat, valid=None, max_norm=None) -> np.ndarray:
    """
    HSV coding of flow vectors: hue is the direction, brightness the magnitude relative to `max_norm`.
    Invalid predictions are gray. Returns RGB values in [0, 1] of shape (N, 3).
    """
    n_hat = np.asarray(n_hat, dtype=np.float64).reshape(-1, 2)
    valid = np.ones(len(n_hat), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    norms = np.linalg.norm(n_hat, axis=1)
    if max_norm is None:
        max_norm = norms[valid].max() if valid.any() else 0.0
    hue = np.mod(np.arctan2(n_hat[:, 1], n_hat[:, 0]), 2 * np.pi) / (2 * np.pi)
    value = np.clip(norms / max_norm, 0, 1) if max_norm > 0 else np.zeros(len(n_hat))
    rgb = hsv_to_rgb(np.stack([hue, np.ones(len(n_hat)), value], axis=1))
    rgb[~valid] = INVALID_GRAY
    return rgb


def rasterize_flow(x, y, n_hat, valid=None, width=346, height=260, extent=None) -> np.ndarray:
    """
    Draws every event into a (height, width, 3) uint8 image, later events overwrite earlier ones.
    Pixels without events stay black. `extent` is (x_min, x_max, y_min, y_max) in normalized coordinates and
    defaults to the bounding box of the events.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) == 0:
        raise EmptyPredictions('There are no predictions to plot')
    if extent is None:
        extent = (x.min(), x.max(), y.min(), y.max())
    x_min, x_max, y_min, y_max = extent
    x_span = x_max - x_min if x_max > x_min else 1.0
    y_span = y_max - y_min if y_max > y_min else 1.0

    cols = np.clip(np.floor((x - x_min) / x_span * (width - 1) + 0.5), 0, width - 1).astype(np.int64)
    rows = np.clip(np.floor((y - y_min) / y_span * (height - 1) + 0.5), 0, height - 1).astype(np.int64)
    image = np.zeros((height, width, 3), dtype=np.uint8)
    image[rows, cols] = np.round(flow_to_rgb(n_hat, valid) * 255).astype(np.uint8)
    return image


def save_ppm(path, image: np.ndarray):
    Image.fromarray(image).save(path, format='PPM')


def get_density_plot(row, proj: RandomProjection, extent: float = 1.5, resolution: int = 81, figure_kwargs={}):
    """
    Plots the density reconstructed from one encoding row on the x-y plane (t = 0) and the x-t plane (y = 0).
    Coordinates are relative to the event and scaled by the neighborhood radii.
    """
    axis = np.linspace(-extent, extent, resolution)
    a, b = np.meshgrid(axis, axis)
    zeros = np.zeros_like(a)
    xy_grid = np.stack([zeros, a, b], axis=-1).reshape(-1, 3)
    xt_grid = np.stack([b, a, zeros], axis=-1).reshape(-1, 3)
    xy_density = reconstruct_density(row, proj, xy_grid).reshape(a.shape)
    xt_density = reconstruct_density(row, proj, xt_grid).reshape(a.shape)

    f, axes = plt.subplots(1, 2, **figure_kwargs)
    for ax, density, ylabel in zip(axes, [xy_density, xt_density], ['y / dy', 't / dt']):
        image = ax.imshow(density, origin='lower', extent=(-extent, extent, -extent, extent), cmap='viridis')
        ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color='white', linestyle='--'))
        ax.set_xlabel('x / dx')
        ax.set_ylabel(ylabel)
        f.colorbar(image, ax=ax)
    axes[0].title.set_text('Density at t = 0')
    axes[1].title.set_text('Density at y = 0')
    return f, axes
