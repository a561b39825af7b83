from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the quaternion code and the solver."""

    norm_drift: float = 1e-12
    newton: float = 1e-10
    dedup: float = 1e-6
    success: float = 1e-9
    snap: float = 1e-6
    singular: float = 1e-4
    commute: float = 1e-6
    rotation: float = 1e-9


DEFAULT = Tolerances()
