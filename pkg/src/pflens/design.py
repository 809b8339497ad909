"""Phase-Fresnel-lens zone layouts, scalar efficiency, and chromatic limits.

A phase Fresnel lens is described here by the radii at which its phase
profile completes full 2 pi cycles,

    r_p^2 = 2 f p lam + p^2 lam^2,    p = 1 .. p_max,

together with the etch depth lam / (2 (n - 1)) that realizes a half-wave
(pi) step in a substrate of index n. The p-th ring is one full Fresnel
period; a binary lens etches an annulus inside each period.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SchemaError

FUSED_SILICA_INDEX = 1.4738  # near-UV value; reproduces a 390 nm half-wave etch at 369.5 nm


@dataclass(frozen=True)
class LensDesign:
    """Parameters defining a phase Fresnel lens.

    Lengths in meters. phase_levels is the number of discrete phase
    steps N >= 2 (2 = binary). substrate_index is the refractive index
    of the lens substrate at the design wavelength.
    """

    focal_length: float
    clear_aperture_diameter: float
    design_wavelength: float
    phase_levels: int = 2
    substrate_index: float = FUSED_SILICA_INDEX

    def __post_init__(self):
        for name in ("focal_length", "clear_aperture_diameter", "design_wavelength"):
            if not (getattr(self, name) > 0):
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if not (isinstance(self.phase_levels, int) and self.phase_levels >= 2):
            raise DomainError(f"phase_levels must be an integer >= 2, got {self.phase_levels}")
        if not (self.substrate_index > 1):
            raise DomainError(f"substrate_index must be > 1, got {self.substrate_index}")


@dataclass(frozen=True)
class ZoneLayout:
    """Realized ring radii and etch depth of a phase Fresnel lens.

    ring_radii are the full-period radii r_p in meters, strictly
    increasing and bounded by aperture_radius. design_wavelength and
    phase_levels are retained so that the diffraction module can
    reconstruct the phase profile the rings realize.
    """

    ring_radii: np.ndarray
    etch_depth: float
    aperture_radius: float
    design_wavelength: float
    phase_levels: int = 2

    def __post_init__(self):
        radii = np.asarray(self.ring_radii, dtype=float)
        object.__setattr__(self, "ring_radii", radii)
        if radii.ndim != 1:
            raise DomainError("ring_radii must be a 1-D sequence")
        if radii.size and not np.all(np.diff(radii) > 0):
            raise DomainError("ring_radii must be strictly increasing")
        if radii.size and not (radii[0] > 0):
            raise DomainError("ring radii must be positive")
        if radii.size and radii[-1] > self.aperture_radius * (1 + 1e-12):
            raise DomainError("ring radii must not exceed the aperture radius")
        if not (self.etch_depth > 0):
            raise DomainError(f"etch_depth must be > 0, got {self.etch_depth}")
        if not (self.aperture_radius > 0):
            raise DomainError(f"aperture_radius must be > 0, got {self.aperture_radius}")
        if not (self.design_wavelength > 0):
            raise DomainError(f"design_wavelength must be > 0, got {self.design_wavelength}")
        if not (isinstance(self.phase_levels, int) and self.phase_levels >= 2):
            raise DomainError(f"phase_levels must be an integer >= 2, got {self.phase_levels}")

    @property
    def zone_count(self) -> int:
        return int(self.ring_radii.size)

    def focal_length(self) -> float:
        """Focal length implied by the first ring, (r_1^2 - lam^2) / (2 lam).

        Exact inversion of the ring equation at p = 1.
        """
        if self.zone_count == 0:
            raise DomainError("empty layout has no implied focal length")
        lam = self.design_wavelength
        return (float(self.ring_radii[0]) ** 2 - lam**2) / (2 * lam)

    def truncated(self, radius: float) -> "ZoneLayout":
        """Layout restricted to rings within the given radius [m]."""
        if not (0 < radius):
            raise DomainError(f"truncation radius must be > 0, got {radius}")
        radius = min(radius, self.aperture_radius)
        keep = self.ring_radii[self.ring_radii <= radius]
        return ZoneLayout(
            ring_radii=keep,
            etch_depth=self.etch_depth,
            aperture_radius=radius,
            design_wavelength=self.design_wavelength,
            phase_levels=self.phase_levels,
        )


@dataclass(frozen=True)
class ChromaticSpec:
    """Fractional wavelength (equivalently frequency) detuning.

    Valid only in the small-shift regime |detuning| < 1e-2 where the
    linear focal-shift model applies.
    """

    fractional_detuning: float

    def __post_init__(self):
        if not (abs(self.fractional_detuning) < 1e-2):
            raise DomainError(
                "fractional_detuning must satisfy |x| < 1e-2, got "
                f"{self.fractional_detuning}"
            )


def fractional_detuning_from_frequency(frequency_shift: float, wavelength: float) -> ChromaticSpec:
    """ChromaticSpec for a frequency shift [Hz] on a carrier of given wavelength [m]."""
    c0 = 299792458.0
    return ChromaticSpec(frequency_shift * wavelength / c0)


def zone_layout(design: LensDesign) -> ZoneLayout:
    """All ring radii of a design, with the half-wave etch depth.

    p_max is the largest integer p with r_p <= D/2, found from the
    closed-form root of r_p^2 = 2 f p lam + p^2 lam^2 and then nudged by
    direct enumeration to rule out floating-point fence-post errors at
    the aperture edge.
    """
    f = design.focal_length
    lam = design.design_wavelength
    aperture_radius = design.clear_aperture_diameter / 2.0

    def ring_radius(p):
        return np.sqrt(2 * f * p * lam + (p * lam) ** 2)

    # root of lam^2 p^2 + 2 f lam p - R^2 = 0
    p_continuous = (math.sqrt(f * f + aperture_radius * aperture_radius) - f) / lam
    p_max = int(math.floor(p_continuous))
    while p_max >= 1 and ring_radius(p_max) > aperture_radius:
        p_max -= 1
    while ring_radius(p_max + 1) <= aperture_radius:
        p_max += 1

    radii = ring_radius(np.arange(1, p_max + 1, dtype=float)) if p_max >= 1 else np.empty(0)
    return ZoneLayout(
        ring_radii=radii,
        etch_depth=etch_depth(design),
        aperture_radius=aperture_radius,
        design_wavelength=lam,
        phase_levels=design.phase_levels,
    )


def etch_depth(design: LensDesign) -> float:
    """Substrate etch depth [m] giving a half-wave step: lam / (2 (n - 1))."""
    return design.design_wavelength / (2.0 * (design.substrate_index - 1.0))


def multilevel_efficiency(
    levels: int,
    include_fresnel_losses: bool = False,
    surface_transmission: float = 1.0,
) -> float:
    """Scalar first-order efficiency of an N-level phase grating.

    [sin(pi/N) / (pi/N)]^2, optionally multiplied by a two-surface
    transmission factor when include_fresnel_losses is set. Approaches 1
    as N grows (perfect blaze); equals (2/pi)^2 = 0.405 for binary.
    """
    if not (isinstance(levels, int) and levels >= 2):
        raise DomainError(f"levels must be an integer >= 2, got {levels}")
    if not (0 < surface_transmission <= 1):
        raise DomainError(
            f"surface_transmission must be in (0, 1], got {surface_transmission}"
        )
    x = math.pi / levels
    eff = (math.sin(x) / x) ** 2
    if include_fresnel_losses:
        eff *= surface_transmission
    return eff


def fresnel_plate_transmission(substrate_index: float) -> float:
    """Normal-incidence transmission of a two-surface plate, (1 - R)^2.

    R = ((n - 1) / (n + 1))^2 per surface; about 0.93 for fused silica.
    The index-matched limit n = 1 transmits everything.
    """
    if not (substrate_index >= 1):
        raise DomainError(f"substrate_index must be >= 1, got {substrate_index}")
    reflectance = ((substrate_index - 1) / (substrate_index + 1)) ** 2
    return (1 - reflectance) ** 2


def chromatic_focal_shift(design: LensDesign, chromatic: ChromaticSpec) -> float:
    """Signed focal shift [m] of a diffractive lens under a small detuning.

    Linear model: delta_f = f0 * (delta_lam / lam0). A diffractive lens
    focuses shorter wavelengths farther away, so the shift carries the
    sign of the wavelength detuning.
    """
    return design.focal_length * chromatic.fractional_detuning


def rayleigh_range_gaussian(waist: float, wavelength: float) -> float:
    """Rayleigh range pi w0^2 / lam of a Gaussian beam of waist w0."""
    if not (waist > 0 and wavelength > 0):
        raise DomainError("waist and wavelength must be > 0")
    return math.pi * waist * waist / wavelength


def depth_of_focus(na: float, wavelength: float) -> float:
    """Nominal depth of focus 4 lam / (pi NA^2) of an aperture of given NA.

    This is the aperture-based convention; it differs from the
    waist-based rayleigh_range_gaussian and the two are never
    interchanged silently.
    """
    if not (0 < na <= 1):
        raise DomainError(f"na must be in (0, 1], got {na}")
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    return 4.0 * wavelength / (math.pi * na * na)


def max_focal_length_for_dof(na: float, chromatic: ChromaticSpec, wavelength: float) -> float:
    """Longest focal length keeping the chromatic shift within the depth of focus.

    4 lam / (pi * |detuning| * NA^2); at this focal length the shift
    equals the nominal depth of focus 4 lam / (pi NA^2) exactly.
    """
    if na == 0:
        raise DomainError("na must be nonzero")
    if chromatic.fractional_detuning == 0:
        raise DomainError("fractional detuning must be nonzero")
    if not (0 < na <= 1):
        raise DomainError(f"na must be in (0, 1], got {na}")
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    return 4.0 * wavelength / (math.pi * abs(chromatic.fractional_detuning) * na * na)


ZONE_CSV_HEADER = ["p", "r_p_m"]


def zone_csv_text(layout: ZoneLayout) -> str:
    """Zone table as CSV text: columns p, r_p in meters, 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ZONE_CSV_HEADER)
    for p, r in enumerate(layout.ring_radii, start=1):
        writer.writerow([p, f"{r:.17g}"])
    return buf.getvalue()


def write_zone_csv(layout: ZoneLayout, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(zone_csv_text(layout))


def read_zone_csv(
    path,
    design_wavelength: float,
    phase_levels: int = 2,
    etch_depth_m: float | None = None,
    aperture_radius: float | None = None,
    substrate_index: float = FUSED_SILICA_INDEX,
) -> ZoneLayout:
    """Reconstruct a ZoneLayout from a zone CSV.

    The CSV stores only (p, r_p); wavelength and level count must be
    supplied. The etch depth defaults to the half-wave depth for the
    given substrate index, and the aperture to the outermost ring.
    """
    radii = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ZONE_CSV_HEADER:
            raise SchemaError(
                f"expected zone CSV header {ZONE_CSV_HEADER}, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError(f"line {lineno}: expected 2 columns, got {len(row)}")
            try:
                p = int(row[0])
                r = float(row[1])
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            if p != len(radii) + 1:
                raise SchemaError(f"line {lineno}: ring index {p} out of sequence")
            radii.append(r)
    radii = np.asarray(radii)
    if etch_depth_m is None:
        etch_depth_m = design_wavelength / (2.0 * (substrate_index - 1.0))
    if aperture_radius is None:
        aperture_radius = float(radii[-1]) if radii.size else design_wavelength
    return ZoneLayout(
        ring_radii=radii,
        etch_depth=etch_depth_m,
        aperture_radius=aperture_radius,
        design_wavelength=design_wavelength,
        phase_levels=phase_levels,
    )
