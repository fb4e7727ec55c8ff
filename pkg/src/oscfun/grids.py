import numpy as np


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid on [0, t_max] whose spacing is as close to ``dt`` as possible.

    The endpoint t_max is always a sample; the number of steps is
    round(t_max / dt), so the realized spacing differs from ``dt`` only when
    t_max is not a multiple of it.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_max >= 0:
        raise ValueError(f"t_max must be non-negative, got {t_max}")
    steps = int(round(t_max / dt))
    if t_max > 0:
        steps = max(steps, 1)
    return np.linspace(0.0, t_max, steps + 1)
