"""Quasi-discrete Hankel transform of order zero.

Collocation on Bessel-function zeros: with j_1 < j_2 < ... the positive
roots of J0 and S = j_{N+1}, fields sampled at r_n = j_n R / S map to
angular spectra sampled at k_m = j_m / R. The transform pair used here
(k-space convention) is

    A(k_m) = 2 pi * (2 R^2 / S^2) * sum_n f(r_n) J0(j_m j_n / S) / J1(j_n)^2
    f(r_n) = sum_m A(k_m) J0(j_m j_n / S) / (pi R^2 J1(j_m)^2)

Both directions share the symmetric kernel J0(j_m j_n / S), so only one
N x N float64 matrix is stored. For N in the ten-thousands this matrix
is the dominant memory cost (8 N^2 bytes); build_kernel assembles it in
row blocks to bound the transient overhead.

The quadrature is spectrally accurate for fields that decay by r = R and
whose spectra decay by k = S / R.
"""

from __future__ import annotations

import numpy as np
from scipy.special import j0, j1, jn_zeros

from .errors import DomainError

_KERNEL_BLOCK_ROWS = 512


class HankelTransform:
    """Order-zero quasi-discrete Hankel transform on [0, R].

    Precomputes the Bessel-zero grid and the transform kernel once;
    instances are immutable after construction and safe to share.
    """

    def __init__(self, n_points: int, max_radius: float):
        if not (isinstance(n_points, int) and n_points >= 4):
            raise DomainError(f"n_points must be an integer >= 4, got {n_points}")
        if not (max_radius > 0):
            raise DomainError(f"max_radius must be > 0, got {max_radius}")
        self.n_points = n_points
        self.max_radius = float(max_radius)

        roots = jn_zeros(0, n_points + 1)
        self._j = roots[:n_points]
        self._S = roots[n_points]
        self.radii = self._j * (self.max_radius / self._S)
        self.k_radial = self._j / self.max_radius
        self._j1sq = j1(self._j) ** 2

        self._kernel = self._build_kernel()

        # quadrature weights for radial power integrals: 2 pi int |f|^2 r dr
        self.power_weights = (4.0 * np.pi * self.max_radius**2 / self._S**2) / self._j1sq
        # same rule in k space: (1 / 2 pi) int |A|^2 k dk
        self.spectral_power_weights = 1.0 / (np.pi * self.max_radius**2 * self._j1sq)

    def _build_kernel(self) -> np.ndarray:
        n = self.n_points
        kernel = np.empty((n, n), dtype=np.float64)
        scaled = self._j / self._S
        for start in range(0, n, _KERNEL_BLOCK_ROWS):
            stop = min(start + _KERNEL_BLOCK_ROWS, n)
            kernel[start:stop] = j0(np.outer(self._j[start:stop], scaled))
        return kernel

    def _apply(self, values: np.ndarray) -> np.ndarray:
        # kernel is real; multiply real and imaginary parts separately to
        # avoid materializing a complex copy of the N x N matrix
        scaled = values / self._j1sq
        if np.iscomplexobj(scaled):
            return self._kernel @ scaled.real + 1j * (self._kernel @ scaled.imag)
        return self._kernel @ scaled

    def forward(self, field_values: np.ndarray) -> np.ndarray:
        """Angular spectrum A(k_m) of samples f(r_n)."""
        field_values = np.asarray(field_values)
        if field_values.shape != (self.n_points,):
            raise DomainError(
                f"expected {self.n_points} samples, got shape {field_values.shape}"
            )
        scale = 4.0 * np.pi * self.max_radius**2 / self._S**2
        return scale * self._apply(field_values)

    def inverse(self, spectrum_values: np.ndarray) -> np.ndarray:
        """Field samples f(r_n) from an angular spectrum A(k_m)."""
        spectrum_values = np.asarray(spectrum_values)
        if spectrum_values.shape != (self.n_points,):
            raise DomainError(
                f"expected {self.n_points} samples, got shape {spectrum_values.shape}"
            )
        scale = 1.0 / (np.pi * self.max_radius**2)
        return scale * self._apply(spectrum_values)

    def resample_matrix(self, radii: np.ndarray) -> np.ndarray:
        """Matrix evaluating the band-limited field at arbitrary radii.

        Row i of the result, applied to an angular spectrum, sums the
        Fourier-Bessel series at radii[i]. Used to interpolate focal
        fields onto grids much finer than the native collocation points.
        """
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        if np.any(radii < 0) or np.any(radii > self.max_radius):
            raise DomainError("resample radii must lie in [0, max_radius]")
        kernel = j0(np.outer(radii, self.k_radial))
        return kernel / (np.pi * self.max_radius**2 * self._j1sq)

    def radial_power(self, field_values: np.ndarray) -> float:
        """Discretized total power 2 pi int |f(r)|^2 r dr."""
        return float(np.sum(self.power_weights * np.abs(field_values) ** 2))

    def spectral_power(self, spectrum_values: np.ndarray) -> float:
        """Discretized total power (1 / 2 pi) int |A(k)|^2 k dk."""
        return float(
            np.sum(self.spectral_power_weights * np.abs(spectrum_values) ** 2)
        )


_transform_cache: dict[tuple[int, float], HankelTransform] = {}


def get_transform(n_points: int, max_radius: float) -> HankelTransform:
    """Shared HankelTransform instances keyed by grid parameters.

    Kernels are expensive (time and memory), so repeated requests for
    the same grid reuse one instance. The cache keeps only the most
    recent few grids to bound memory.
    """
    key = (n_points, float(max_radius))
    if key not in _transform_cache:
        while len(_transform_cache) >= 3:
            _transform_cache.pop(next(iter(_transform_cache)))
        _transform_cache[key] = HankelTransform(n_points, max_radius)
    return _transform_cache[key]


def clear_transform_cache() -> None:
    """Release all cached transform kernels (they can be gigabytes)."""
    _transform_cache.clear()
