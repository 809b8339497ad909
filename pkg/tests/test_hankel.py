"""Quasi-discrete Hankel transform: round trips, Parseval, caching."""

from __future__ import annotations

import numpy as np
import pytest

from pflens import DomainError, HankelTransform, clear_transform_cache, get_transform


@pytest.fixture(scope="module")
def transform() -> HankelTransform:
    return HankelTransform(n_points=512, max_radius=1e-3)


def gaussian(radii: np.ndarray, waist: float) -> np.ndarray:
    return np.exp(-((radii / waist) ** 2))


class TestGridStructure:
    def test_radii_increasing_and_bounded(self, transform):
        assert transform.n_points == 512
        assert transform.radii.shape == (512,)
        assert np.all(np.diff(transform.radii) > 0)
        assert transform.radii[0] > 0
        assert transform.radii[-1] < transform.max_radius

    def test_spectral_grid_increasing(self, transform):
        assert transform.k_radial.shape == (512,)
        assert np.all(np.diff(transform.k_radial) > 0)
        assert transform.k_radial[0] > 0

    def test_rejects_degenerate_parameters(self):
        with pytest.raises(DomainError):
            HankelTransform(n_points=0, max_radius=1e-3)
        with pytest.raises(DomainError):
            HankelTransform(n_points=64, max_radius=0.0)


class TestRoundTripAndParseval:
    def test_forward_inverse_round_trip(self, transform):
        field = gaussian(transform.radii, 150e-6)
        recovered = transform.inverse(transform.forward(field))
        assert np.max(np.abs(recovered - field)) < 1e-12

    def test_inverse_forward_round_trip(self, transform):
        spectrum = gaussian(transform.k_radial, 2e4)
        recovered = transform.forward(transform.inverse(spectrum))
        assert np.max(np.abs(recovered - spectrum)) < 1e-12

    def test_parseval(self, transform):
        field = gaussian(transform.radii, 150e-6) * np.exp(
            1j * 2e3 * transform.radii
        )
        spectrum = transform.forward(field)
        p_real = transform.radial_power(field)
        p_spec = transform.spectral_power(spectrum)
        assert p_spec == pytest.approx(p_real, rel=1e-6)

    def test_radial_power_matches_analytic_gaussian(self, transform):
        # integral of exp(-2 r^2 / w^2) 2 pi r dr = pi w^2 / 2
        waist = 150e-6
        field = gaussian(transform.radii, waist)
        assert transform.radial_power(field) == pytest.approx(
            np.pi * waist**2 / 2, rel=1e-6
        )

    def test_forward_matches_analytic_gaussian_pair(self, transform):
        # under A(k) = 2 pi int f(r) J0(kr) r dr, exp(-r^2/w^2)
        # transforms to pi w^2 exp(-k^2 w^2 / 4)
        waist = 120e-6
        spectrum = transform.forward(gaussian(transform.radii, waist))
        expected = np.pi * waist**2 * np.exp(-((transform.k_radial * waist) ** 2) / 4)
        assert np.max(np.abs(spectrum - expected)) / expected.max() < 1e-9


class TestResample:
    def test_resample_matrix_evaluates_spectrum_at_new_radii(self, transform):
        waist = 150e-6
        spectrum = transform.forward(gaussian(transform.radii, waist))
        targets = np.linspace(0.0, 600e-6, 64)
        resampled = transform.resample_matrix(targets) @ spectrum
        assert np.max(np.abs(resampled - gaussian(targets, waist))) < 1e-9

    def test_resample_rejects_radii_outside_grid(self, transform):
        spectrum = transform.forward(gaussian(transform.radii, 150e-6))
        with pytest.raises(DomainError):
            transform.resample_matrix(np.array([transform.max_radius * 1.01]))


class TestCache:
    def test_get_transform_reuses_instances(self):
        clear_transform_cache()
        a = get_transform(256, 1e-3)
        b = get_transform(256, 1e-3)
        assert a is b

    def test_distinct_parameters_distinct_instances(self):
        a = get_transform(256, 1e-3)
        b = get_transform(256, 2e-3)
        assert a is not b

    def test_clear_cache_releases_instances(self):
        a = get_transform(256, 1e-3)
        clear_transform_cache()
        b = get_transform(256, 1e-3)
        assert a is not b
