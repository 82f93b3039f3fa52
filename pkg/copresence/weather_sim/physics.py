import math

MAGNUS_ALPHA = 17.27
MAGNUS_BETA = 237.7  # degrees C

RELATIVE_MOISTURE_FLOOR = 1e-3


def fog_density(temperature: float, relative_moisture: float, clip: bool = True) -> float:
    """Dew-point style fog density from the Magnus approximation.

    Returns alpha*T / (beta + T) + ln(S_rel), floored at 0 when `clip`.
    """
    if not relative_moisture > 0:
        raise ValueError(f"relative moisture must be positive, got {relative_moisture}")
    if relative_moisture > 1:
        raise ValueError(f"relative moisture must be at most 1, got {relative_moisture}")
    if not temperature > -MAGNUS_BETA:
        raise ValueError(f"temperature must exceed {-MAGNUS_BETA}, got {temperature}")

    density = MAGNUS_ALPHA * temperature / (MAGNUS_BETA + temperature) + math.log(
        relative_moisture
    )
    return max(density, 0.0) if clip else density


def relative_moisture(moisture: float, capacity: float) -> float:
    """Moisture storage as a fraction of `capacity`, kept inside (0, 1]."""
    return min(max(moisture / capacity, RELATIVE_MOISTURE_FLOOR), 1.0)
