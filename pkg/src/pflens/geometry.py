"""Aperture and acceptance-cone conversions.

Conventions used throughout the package:

- numerical aperture NA = sin(theta) of the marginal-ray half-angle,
  dimensionless, in [0, 1] (emission into vacuum/air, n = 1);
- cone half-angles in radians, in [0, pi];
- all lengths in meters.

Functions accept and return plain floats; invariants are enforced here
so downstream modules can assume valid values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class LensGeometry:
    """Focal length and clear aperture of a lens, both in meters."""

    focal_length: float
    clear_aperture_diameter: float

    def __post_init__(self):
        if not (self.focal_length > 0):
            raise DomainError(f"focal_length must be > 0, got {self.focal_length}")
        if not (self.clear_aperture_diameter > 0):
            raise DomainError(
                f"clear_aperture_diameter must be > 0, got {self.clear_aperture_diameter}"
            )

    @property
    def f_number(self) -> float:
        """Focal length over aperture diameter."""
        return self.focal_length / self.clear_aperture_diameter


def check_na(na: float) -> float:
    """Validate a numerical aperture value and return it."""
    if not (0.0 <= na <= 1.0) or math.isnan(na):
        raise DomainError(f"numerical aperture must be in [0, 1], got {na}")
    return float(na)


def check_cone_angle(theta: float) -> float:
    """Validate a cone half-angle [rad] and return it."""
    if not (0.0 <= theta <= math.pi) or math.isnan(theta):
        raise DomainError(f"cone half-angle must be in [0, pi], got {theta}")
    return float(theta)


def na_from_geometry(geometry: LensGeometry) -> float:
    """Exact numerical aperture of a lens from its geometry.

    Returns the sine of the marginal-ray half-angle,
    (D/2) / sqrt(f^2 + (D/2)^2), identical to 1/sqrt(1 + 4 (F/#)^2).
    """
    half_aperture = geometry.clear_aperture_diameter / 2.0
    return half_aperture / math.hypot(geometry.focal_length, half_aperture)


def na_small_angle(f_number: float) -> float:
    """Catalog small-angle estimate NA ~ 1/(2 F/#), clamped to 1.

    Overstates the true NA for fast lenses; for F/# >= 2 it is within
    about 3% of the exact value from na_from_geometry. Use only in the
    small-angle regime.
    """
    if not (f_number > 0):
        raise DomainError(f"f_number must be > 0, got {f_number}")
    return min(1.0, 1.0 / (2.0 * f_number))


def solid_angle_fraction(na: float) -> float:
    """Fraction of the full 4 pi sphere subtended by a cone of given NA.

    (1 - cos(asin NA)) / 2; maps [0, 1] onto [0, 0.5].
    """
    check_na(na)
    # 1 - cos(asin x) = 1 - sqrt(1 - x^2), stable as written for x <= 1
    return (1.0 - math.sqrt(1.0 - na * na)) / 2.0


def cone_from_na(na: float) -> float:
    """Half-angle [rad] of the acceptance cone with the given NA."""
    check_na(na)
    return math.asin(na)


def na_from_cone(theta: float) -> float:
    """NA of an acceptance cone of half-angle theta [rad].

    Restricted to theta <= pi/2 so that the pair (cone_from_na,
    na_from_cone) is an exact inverse on [0, pi/2].
    """
    check_cone_angle(theta)
    if theta > math.pi / 2:
        raise DomainError(
            f"na_from_cone requires theta <= pi/2 for an invertible mapping, got {theta}"
        )
    return math.sin(theta)
