"""Shared fixtures and hypothesis settings for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pflens import LensDesign

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


# The reference lens used throughout: f = 3 mm, D = 5 mm, 369.5 nm.
REFERENCE_FOCAL_LENGTH = 3e-3
REFERENCE_APERTURE = 5e-3
REFERENCE_WAVELENGTH = 369.5e-9

# Small lens for fast diffraction tests: 58 zones at 854 nm, NA 0.6.
TOY_WAVELENGTH = 854e-9
TOY_FOCAL_LENGTH = 200e-6
TOY_APERTURE = 300e-6
TOY_INPUT_WAIST = 75e-6
TOY_GRID_RADIUS = 400e-6


@pytest.fixture(scope="session")
def reference_design() -> LensDesign:
    return LensDesign(
        focal_length=REFERENCE_FOCAL_LENGTH,
        clear_aperture_diameter=REFERENCE_APERTURE,
        design_wavelength=REFERENCE_WAVELENGTH,
    )


@pytest.fixture(scope="session")
def toy_design() -> LensDesign:
    return LensDesign(
        focal_length=TOY_FOCAL_LENGTH,
        clear_aperture_diameter=TOY_APERTURE,
        design_wavelength=TOY_WAVELENGTH,
    )


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)
