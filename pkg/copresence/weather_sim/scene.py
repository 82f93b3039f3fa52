import numpy as np


def render_base_scene(rng: np.random.Generator, size: int) -> np.ndarray:
    """Procedural street scene under fixed daylight: sky, ground and buildings."""
    rows = (np.arange(size) + 0.5) / size
    horizon = rng.uniform(0.35, 0.55)

    image = np.empty((size, size, 3))
    sky_top = np.array([0.35, 0.55, 0.85])
    sky_bottom = np.array([0.7, 0.8, 0.92])
    blend = np.clip(rows / horizon, 0.0, 1.0)[:, None]
    sky = (1.0 - blend) * sky_top + blend * sky_bottom
    image[:] = sky[:, None, :]

    ground_color = np.array([0.3, 0.45, 0.25]) + rng.uniform(-0.08, 0.08, size=3)
    horizon_row = int(horizon * size)
    image[horizon_row:] = ground_color

    # road widening towards the viewer
    for row in range(horizon_row, size):
        depth = (row - horizon_row + 1) / max(size - horizon_row, 1)
        half_width = int(0.5 * depth * size * 0.6)
        center = size // 2
        image[row, max(center - half_width, 0) : center + half_width] = [0.35, 0.35, 0.37]

    for _ in range(int(rng.integers(2, 6))):
        width = int(rng.integers(size // 10, size // 4))
        height = int(rng.integers(size // 8, max(horizon_row, size // 8 + 1)))
        left = int(rng.integers(0, size - width))
        top = max(horizon_row - height, 0)
        color = rng.uniform(0.25, 0.75, size=3)
        image[top:horizon_row, left : left + width] = color

    return np.clip(image, 0.0, 1.0)
