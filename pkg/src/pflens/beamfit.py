"""Knife-edge beam profiling: scan reduction and Gaussian caustic fits.

A razor blade stepped across a Gaussian beam transmits

    P(x) = background + (P_total / 2) erfc(sqrt(2) (x - center) / w)

when the blade cuts IN (covering increasing x), and the complement when
it backs OUT. Fitting one scan yields the 1/e^2 intensity radius w at a
single axial position. Fitting w^2 against z with

    w^2(z) = w0^2 + (m2 lam / (pi w0))^2 (z - z0)^2

yields the waist w0, the propagation factor m2 (>= 1 for physical
beams), and the focus location z0. Scans tagged "in" may carry a common
axial shift relative to "out" scans (a systematic artifact of the scan
direction); the caustic fit exposes it as a fourth parameter,
direction_offset, fixed to zero when only one direction is present.

Both fits use analytic Jacobians and a bounded least-squares solver
with at most 200 model evaluations and a relative step tolerance of
1e-10, so results are deterministic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares
from scipy.special import erfc

from .errors import DomainError, FitError, SchemaError

_MIN_SCAN_SAMPLES = 8
_DIRECTIONS = ("in", "out")

# normalized transmission levels a distance w / sqrt(2) either side of
# the edge center: erfc(-1) / 2 and erfc(1) / 2
_LEVEL_HIGH = 0.921350396474857
_LEVEL_LOW = 0.078649603525143

_MAX_MODEL_EVALS = 200
_STEP_TOL = 1e-10


def _check_direction(direction: str) -> str:
    if direction not in _DIRECTIONS:
        raise DomainError(f"direction must be 'in' or 'out', got {direction!r}")
    return direction


@dataclass(frozen=True)
class KnifeEdgeScan:
    """One knife-edge scan: transmitted power vs blade position.

    z is the axial position of the scan [m]. blade_positions [m] must be
    strictly monotone (either direction of travel); powers are
    transmitted powers in consistent but arbitrary units, non-negative.
    direction records whether the blade was cutting into the beam
    ("in", transmission falling with position) or backing out ("out").
    """

    z: float
    blade_positions: np.ndarray
    powers: np.ndarray
    direction: str = "in"

    def __post_init__(self):
        positions = np.asarray(self.blade_positions, dtype=float)
        powers = np.asarray(self.powers, dtype=float)
        object.__setattr__(self, "blade_positions", positions)
        object.__setattr__(self, "powers", powers)
        if not math.isfinite(self.z):
            raise DomainError(f"scan position must be finite, got {self.z}")
        if positions.ndim != 1 or powers.ndim != 1:
            raise DomainError("blade_positions and powers must be 1-D sequences")
        if positions.size != powers.size:
            raise DomainError(
                f"blade_positions and powers disagree in length "
                f"({positions.size} vs {powers.size})"
            )
        if positions.size < _MIN_SCAN_SAMPLES:
            raise DomainError(
                f"a scan needs at least {_MIN_SCAN_SAMPLES} samples, got {positions.size}"
            )
        if not np.all(np.isfinite(positions)) or not np.all(np.isfinite(powers)):
            raise DomainError("scan samples must be finite")
        steps = np.diff(positions)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError("blade_positions must be strictly monotone")
        if np.any(powers < 0):
            raise DomainError("powers must be non-negative")
        _check_direction(self.direction)


@dataclass(frozen=True)
class WaistPoint:
    """Fitted 1/e^2 radius at one axial position.

    w and w_uncertainty in meters; w_uncertainty is the 1 sigma value
    from the scan-fit covariance. direction is inherited from the scan.
    """

    z: float
    w: float
    w_uncertainty: float
    direction: str = "in"

    def __post_init__(self):
        if not (self.w > 0):
            raise DomainError(f"fitted radius must be > 0, got {self.w}")
        if not (self.w_uncertainty >= 0):
            raise DomainError(
                f"radius uncertainty must be >= 0, got {self.w_uncertainty}"
            )
        _check_direction(self.direction)


@dataclass(frozen=True)
class CausticFit:
    """Gaussian caustic parameters fitted to waist-vs-z data.

    w0 is the 1/e^2 waist radius [m], m2 the beam propagation factor,
    z0 the focus location [m], and direction_offset [m] the common
    axial shift of "in"-direction points relative to "out" ones (zero,
    and not fitted, when the data contain a single direction).
    covariance is the 4 x 4 matrix over (w0, m2, z0, direction_offset);
    warnings carries conditioning or physicality notes.
    """

    w0: float
    m2: float
    z0: float
    direction_offset: float
    covariance: np.ndarray
    warnings: tuple = field(default=())

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if not (self.w0 > 0):
            raise DomainError(f"w0 must be > 0, got {self.w0}")
        if not (self.m2 > 0):
            raise DomainError(f"m2 must be > 0, got {self.m2}")
        if cov.shape != (4, 4):
            raise DomainError(f"covariance must be 4 x 4, got shape {cov.shape}")
        scale = float(np.max(np.abs(cov))) if cov.size else 0.0
        if not np.allclose(cov, cov.T, atol=1e-12 * (1.0 + scale)):
            raise DomainError("covariance must be symmetric")
        if np.linalg.eigvalsh(0.5 * (cov + cov.T)).min() < -1e-9 * (1.0 + scale):
            raise DomainError("covariance must be positive semidefinite")

    @property
    def w0_uncertainty(self) -> float:
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def m2_uncertainty(self) -> float:
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    @property
    def z0_uncertainty(self) -> float:
        return float(np.sqrt(max(self.covariance[2, 2], 0.0)))

    @property
    def direction_offset_uncertainty(self) -> float:
        return float(np.sqrt(max(self.covariance[3, 3], 0.0)))


# ---------------------------------------------------------------------------
# models and analytic Jacobians


def knife_edge_model(
    blade_position,
    total_power: float,
    center: float,
    w: float,
    *,
    direction: str = "in",
    background: float = 0.0,
):
    """Transmitted power past a knife edge cutting a Gaussian beam.

    For direction "in" the transmission falls from background +
    total_power to background as the blade position sweeps upward; "out"
    is the mirror image. w is the 1/e^2 intensity radius [m].
    """
    if not (w > 0):
        raise DomainError(f"w must be > 0, got {w}")
    _check_direction(direction)
    x = np.asarray(blade_position, dtype=float)
    sign = 1.0 if direction == "in" else -1.0
    t = sign * math.sqrt(2.0) * (x - center) / w
    return background + 0.5 * total_power * erfc(t)


def knife_edge_jacobian(
    blade_position,
    total_power: float,
    center: float,
    w: float,
    *,
    direction: str = "in",
    background: float = 0.0,
) -> np.ndarray:
    """Jacobian of knife_edge_model wrt (total_power, center, w, background).

    Returns an (n, 4) array for n blade positions, matching the
    parameter order used by fit_scan.
    """
    if not (w > 0):
        raise DomainError(f"w must be > 0, got {w}")
    _check_direction(direction)
    x = np.atleast_1d(np.asarray(blade_position, dtype=float))
    sign = 1.0 if direction == "in" else -1.0
    t = sign * math.sqrt(2.0) * (x - center) / w
    gauss = np.exp(-(t**2)) / math.sqrt(math.pi)
    jac = np.empty((x.size, 4))
    jac[:, 0] = 0.5 * erfc(t)
    jac[:, 1] = total_power * sign * math.sqrt(2.0) / w * gauss
    jac[:, 2] = total_power * t / w * gauss
    jac[:, 3] = 1.0
    return jac


def caustic_radius(z, w0: float, m2: float, z0: float, wavelength: float):
    """1/e^2 radius of a Gaussian caustic at axial position z [m]."""
    if not (w0 > 0):
        raise DomainError(f"w0 must be > 0, got {w0}")
    if not (m2 > 0):
        raise DomainError(f"m2 must be > 0, got {m2}")
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    u = np.asarray(z, dtype=float) - z0
    theta = m2 * wavelength / (math.pi * w0)
    return np.sqrt(w0**2 + (theta * u) ** 2)


def caustic_squared_model(
    z,
    in_direction,
    w0: float,
    m2: float,
    z0: float,
    direction_offset: float,
    wavelength: float,
):
    """w^2 at recorded positions z, with "in" points shifted by the offset.

    in_direction is 1 where the point came from an "in"-moving scan and
    0 otherwise; those recorded positions sit direction_offset beyond
    the true axial position.
    """
    z = np.asarray(z, dtype=float)
    ind = np.asarray(in_direction, dtype=float)
    u = z - direction_offset * ind - z0
    theta = m2 * wavelength / (math.pi * w0)
    return w0**2 + (theta * u) ** 2


def caustic_squared_jacobian(
    z,
    in_direction,
    w0: float,
    m2: float,
    z0: float,
    direction_offset: float,
    wavelength: float,
) -> np.ndarray:
    """Jacobian of caustic_squared_model wrt (w0, m2, z0, direction_offset)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    ind = np.atleast_1d(np.asarray(in_direction, dtype=float))
    u = z - direction_offset * ind - z0
    beta = wavelength / (math.pi * w0)
    mb2 = (m2 * beta) ** 2
    jac = np.empty((z.size, 4))
    jac[:, 0] = 2.0 * w0 - 2.0 * mb2 * u**2 / w0
    jac[:, 1] = 2.0 * m2 * beta**2 * u**2
    jac[:, 2] = -2.0 * mb2 * u
    jac[:, 3] = -2.0 * mb2 * u * ind
    return jac


# ---------------------------------------------------------------------------
# scan fitting


def _initial_edge_parameters(u: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Crude (total, center, w, background) start in normalized units.

    u are blade positions scaled to O(1), q powers scaled to [0, 1];
    the center and width come from the 50% and erfc(+-1)/2 quantile
    crossings (the latter sit w / sqrt(2) either side of the center).
    """
    center = float(u[np.argmin(np.abs(q - 0.5))])
    u_high = float(u[np.argmin(np.abs(q - _LEVEL_HIGH))])
    u_low = float(u[np.argmin(np.abs(q - _LEVEL_LOW))])
    w = abs(u_low - u_high) / math.sqrt(2.0)
    spacing = float(np.median(np.abs(np.diff(u))))
    return np.array([1.0, center, max(w, spacing), 0.0])


def fit_scan(scan: KnifeEdgeScan) -> WaistPoint:
    """Least-squares edge fit of one scan; returns the 1/e^2 radius.

    Fits (total_power, center, w, background) with the analytic
    Jacobian, bounded so that total_power >= 0 and w > 0. Internally
    the problem is solved in normalized units (positions scaled by
    their span, powers by their range) so convergence thresholds act on
    O(1) quantities regardless of physical magnitudes. The returned
    uncertainty is the 1 sigma value from the residual-scaled
    covariance.

    Raises FitError when the data are rank deficient (constant power)
    or the solver fails to converge within the evaluation budget.
    """
    x = scan.blade_positions
    p = scan.powers
    power_span = float(p.max() - p.min())
    if power_span <= 0 or power_span < 1e-12 * float(np.abs(p).max()):
        raise FitError(
            "rank-deficient scan: transmitted power is constant, no edge to fit"
        )

    position_span = float(x.max() - x.min())
    x_mid = 0.5 * float(x.max() + x.min())
    p_min = float(p.min())
    u = (x - x_mid) / position_span
    q = (p - p_min) / power_span

    sign = 1.0 if scan.direction == "in" else -1.0
    sqrt2 = math.sqrt(2.0)
    w_floor = 1e-6
    lower = np.array([0.0, -1.5, w_floor, -np.inf])
    upper = np.array([np.inf, 1.5, 100.0, np.inf])
    start = np.clip(_initial_edge_parameters(u, q), lower, upper)

    def residuals(params: np.ndarray) -> np.ndarray:
        total, center, w, background = params
        t = sign * sqrt2 * (u - center) / w
        return background + 0.5 * total * erfc(t) - q

    def jacobian(params: np.ndarray) -> np.ndarray:
        total, center, w, background = params
        return knife_edge_jacobian(
            u, total, center, w, direction=scan.direction, background=background
        )

    result = least_squares(
        residuals,
        start,
        jac=jacobian,
        bounds=(lower, upper),
        method="trf",
        max_nfev=_MAX_MODEL_EVALS,
        xtol=_STEP_TOL,
        ftol=1e-14,
        gtol=1e-14,
    )
    if result.status <= 0:
        raise FitError(
            f"edge fit did not converge within {_MAX_MODEL_EVALS} evaluations",
            residual=float(2.0 * result.cost),
        )
    w_scaled = float(result.x[2])
    if w_scaled <= 2.0 * w_floor:
        raise FitError(
            "edge fit collapsed to zero width", residual=float(2.0 * result.cost)
        )

    jtj = result.jac.T @ result.jac
    if np.linalg.cond(jtj) > 1e14:
        raise FitError(
            "rank-deficient scan: edge parameters are not independently "
            "determined by these samples",
            residual=float(2.0 * result.cost),
        )
    dof = x.size - 4
    scale = 2.0 * result.cost / dof if dof > 0 else 0.0
    covariance = np.linalg.inv(jtj) * scale
    w = w_scaled * position_span
    w_uncertainty = float(np.sqrt(max(covariance[2, 2], 0.0))) * position_span
    return WaistPoint(
        z=scan.z, w=w, w_uncertainty=w_uncertainty, direction=scan.direction
    )


def fit_scans(scans) -> list:
    """Fit a sequence of independent scans in input order."""
    return [fit_scan(scan) for scan in scans]


# ---------------------------------------------------------------------------
# caustic fitting


def fit_caustic(points, wavelength: float) -> CausticFit:
    """Weighted least squares of w^2 vs z over a set of WaistPoints.

    Residuals are weighted by the propagated uncertainty of w^2,
    2 w sigma_w, falling back to an unweighted fit (with a warning)
    when any point lacks a positive uncertainty. direction_offset is
    fitted only when both blade directions are present; otherwise it is
    fixed to zero and its covariance entries are zero.

    Raises DomainError for fewer than 5 points and FitError when the
    solver fails or the fitted waist collapses toward zero.
    """
    points = list(points)
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    if len(points) < 5:
        raise DomainError(f"caustic fit needs at least 5 points, got {len(points)}")
    z = np.array([pt.z for pt in points])
    w = np.array([pt.w for pt in points])
    sigma = np.array([pt.w_uncertainty for pt in points])
    ind = np.array([1.0 if pt.direction == "in" else 0.0 for pt in points])
    mixed = 0.0 < ind.mean() < 1.0

    # normalize: waists by the smallest w, axial positions by the half
    # span, so the solver's tolerances act on O(1) numbers
    i_min = int(np.argmin(w))
    w_scale = float(w[i_min])
    z_scale = 0.5 * float(z.max() - z.min())
    if z_scale <= 0:
        raise DomainError("caustic fit needs points at distinct z positions")
    zeta = (z - z[i_min]) / z_scale
    omega = (w / w_scale) ** 2
    # wavelength rescaled so the model keeps its form in scaled units
    lam_scaled = wavelength * z_scale / w_scale**2

    notes = []
    if np.all(sigma > 0):
        weight = 2.0 * w * sigma / w_scale**2
    else:
        weight = np.ones_like(w)
        notes.append(
            "unweighted fit: at least one point lacks a positive w uncertainty"
        )

    w0_floor = 1e-6
    n_params = 4 if mixed else 3
    start = np.array([1.0, 1.0, 0.0, 0.0][:n_params])
    lower = np.array([w0_floor, 0.05, -np.inf, -np.inf][:n_params])
    upper = np.full(n_params, np.inf)

    def expand(params: np.ndarray) -> tuple[float, float, float, float]:
        if mixed:
            return params[0], params[1], params[2], params[3]
        return params[0], params[1], params[2], 0.0

    def residuals(params: np.ndarray) -> np.ndarray:
        a, m2, b, c = expand(params)
        model = caustic_squared_model(zeta, ind, a, m2, b, c, lam_scaled)
        return (model - omega) / weight

    def jacobian(params: np.ndarray) -> np.ndarray:
        a, m2, b, c = expand(params)
        jac = caustic_squared_jacobian(zeta, ind, a, m2, b, c, lam_scaled)
        return jac[:, :n_params] / weight[:, None]

    result = least_squares(
        residuals,
        start,
        jac=jacobian,
        bounds=(lower, upper),
        method="trf",
        max_nfev=_MAX_MODEL_EVALS,
        xtol=_STEP_TOL,
        ftol=1e-14,
        gtol=1e-14,
    )
    if result.status <= 0:
        raise FitError(
            f"caustic fit did not converge within {_MAX_MODEL_EVALS} evaluations",
            residual=float(2.0 * result.cost),
        )
    a, m2, b, c = expand(result.x)
    if a <= 2.0 * w0_floor:
        raise FitError(
            "caustic fit collapsed: fitted w0^2 is not positive",
            residual=float(2.0 * result.cost),
        )
    w0 = a * w_scale
    z0 = b * z_scale + z[i_min]
    offset = c * z_scale

    jtj = result.jac.T @ result.jac
    if np.linalg.cond(jtj) > 1e14:
        notes.append("near-singular normal equations; uncertainties unreliable")
        reduced = np.linalg.pinv(jtj)
    else:
        reduced = np.linalg.inv(jtj)
    dof = z.size - n_params
    scale = 2.0 * result.cost / dof if dof > 0 else 0.0
    rescale = np.array([w_scale, 1.0, z_scale, z_scale][:n_params])
    block = 0.5 * (reduced + reduced.T) * scale * np.outer(rescale, rescale)
    covariance = np.zeros((4, 4))
    covariance[:n_params, :n_params] = block

    if m2 < 1.0:
        notes.append(
            f"fitted m2 = {m2:.4f} is below 1; physical beams satisfy m2 >= 1"
        )
    rayleigh = math.pi * w0**2 / wavelength
    span = float(z.max() - z.min())
    if span < 2.0 * rayleigh:
        notes.append(
            f"z span {span:.3g} m is below two Rayleigh ranges "
            f"({2.0 * rayleigh:.3g} m); the fit is poorly conditioned"
        )

    return CausticFit(
        w0=float(w0),
        m2=float(m2),
        z0=float(z0),
        direction_offset=float(offset),
        covariance=covariance,
        warnings=tuple(notes),
    )


def derived_beam_parameters(fit: CausticFit, wavelength: float) -> dict:
    """Far-field half-angle and nominal Rayleigh range of a fitted caustic.

    divergence_half_angle = m2 lam / (pi w0) is the asymptotic slope of
    the fitted caustic; rayleigh_range = pi w0^2 / lam is the nominal
    (m2 = 1) value. Both formulas are paraxial and lose meaning as the
    angle approaches 1 rad.
    """
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    return {
        "divergence_half_angle": fit.m2 * wavelength / (math.pi * fit.w0),
        "rayleigh_range": math.pi * fit.w0**2 / wavelength,
    }


# ---------------------------------------------------------------------------
# synthetic data (seeded; the only randomness in the package)


def synthetic_knife_edge_scan(
    z: float,
    w: float,
    center: float = 0.0,
    total_power: float = 1.0,
    background: float = 0.0,
    direction: str = "in",
    n_positions: int = 50,
    span_factor: float = 3.0,
    noise_fraction: float = 0.0,
    rng: np.random.Generator | None = None,
) -> KnifeEdgeScan:
    """Generate one knife-edge scan from the erfc model.

    Blade positions cover center +- span_factor * w. noise_fraction
    applies multiplicative Gaussian noise to each power sample and
    requires a seeded generator.
    """
    if not (w > 0):
        raise DomainError(f"w must be > 0, got {w}")
    if n_positions < _MIN_SCAN_SAMPLES:
        raise DomainError(
            f"n_positions must be >= {_MIN_SCAN_SAMPLES}, got {n_positions}"
        )
    if not (span_factor > 0):
        raise DomainError(f"span_factor must be > 0, got {span_factor}")
    if noise_fraction < 0:
        raise DomainError(f"noise_fraction must be >= 0, got {noise_fraction}")
    if noise_fraction > 0 and rng is None:
        raise DomainError("noisy synthesis requires a seeded random generator")
    positions = np.linspace(center - span_factor * w, center + span_factor * w, n_positions)
    powers = knife_edge_model(
        positions, total_power, center, w, direction=direction, background=background
    )
    if noise_fraction > 0:
        powers = powers * (1.0 + noise_fraction * rng.standard_normal(powers.size))
        powers = np.maximum(powers, 0.0)
    return KnifeEdgeScan(z=z, blade_positions=positions, powers=powers, direction=direction)


def synthetic_caustic_points(
    z_positions,
    w0: float,
    m2: float,
    wavelength: float,
    z0: float = 0.0,
    direction_offset: float = 0.0,
    directions=("in", "out"),
    noise_fraction: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list:
    """WaistPoints sampled from a caustic, one per (z, direction) pair.

    Points tagged "in" record an axial position shifted by
    direction_offset; the underlying beam radius is evaluated at the
    true position. noise_fraction perturbs each radius multiplicatively
    and is reported as the point uncertainty.
    """
    if noise_fraction < 0:
        raise DomainError(f"noise_fraction must be >= 0, got {noise_fraction}")
    if noise_fraction > 0 and rng is None:
        raise DomainError("noisy synthesis requires a seeded random generator")
    points = []
    for z in np.asarray(z_positions, dtype=float):
        radius = float(caustic_radius(z, w0, m2, z0, wavelength))
        for direction in directions:
            _check_direction(direction)
            recorded = z + direction_offset if direction == "in" else z
            value = radius
            if noise_fraction > 0:
                value = radius * (1.0 + noise_fraction * float(rng.standard_normal()))
                value = max(value, 1e-3 * radius)
            points.append(
                WaistPoint(
                    z=float(recorded),
                    w=value,
                    w_uncertainty=noise_fraction * radius,
                    direction=direction,
                )
            )
    return points


def synthetic_caustic_scans(
    z_positions,
    w0: float,
    m2: float,
    wavelength: float,
    z0: float = 0.0,
    direction_offset: float = 0.0,
    directions=("in", "out"),
    total_power: float = 1.0,
    background: float = 0.0,
    n_positions: int = 50,
    span_factor: float = 3.0,
    noise_fraction: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list:
    """Full knife-edge scans sampled along a caustic.

    One scan per (z, direction) pair, each generated by
    synthetic_knife_edge_scan at the local beam radius; "in" scans
    record positions shifted by direction_offset.
    """
    scans = []
    for z in np.asarray(z_positions, dtype=float):
        radius = float(caustic_radius(z, w0, m2, z0, wavelength))
        for direction in directions:
            _check_direction(direction)
            recorded = z + direction_offset if direction == "in" else z
            scans.append(
                synthetic_knife_edge_scan(
                    z=float(recorded),
                    w=radius,
                    total_power=total_power,
                    background=background,
                    direction=direction,
                    n_positions=n_positions,
                    span_factor=span_factor,
                    noise_fraction=noise_fraction,
                    rng=rng,
                )
            )
    return scans


# ---------------------------------------------------------------------------
# CSV interchange

SCAN_HEADER = ["z_m", "direction"]
SAMPLE_HEADER = ["blade_position_m", "power"]
COMBINED_HEADER = ["z_m", "blade_position_m", "power", "direction"]
CAUSTIC_CURVE_CSV_HEADER = ["z_m", "w_m"]


def scan_csv_text(scan: KnifeEdgeScan) -> str:
    """Single-scan CSV: scan header block, then blade/power rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    writer.writerow([f"{scan.z:.17g}", scan.direction])
    writer.writerow(SAMPLE_HEADER)
    for position, power in zip(scan.blade_positions, scan.powers):
        writer.writerow([f"{position:.17g}", f"{power:.17g}"])
    return buffer.getvalue()


def scans_csv_text(scans) -> str:
    """Combined CSV with one row per sample across many scans."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COMBINED_HEADER)
    for scan in scans:
        for position, power in zip(scan.blade_positions, scan.powers):
            writer.writerow(
                [
                    f"{scan.z:.17g}",
                    f"{position:.17g}",
                    f"{power:.17g}",
                    scan.direction,
                ]
            )
    return buffer.getvalue()


def write_scan_csv(path, scan: KnifeEdgeScan) -> None:
    Path(path).write_text(scan_csv_text(scan))


def write_scans_csv(path, scans) -> None:
    Path(path).write_text(scans_csv_text(scans))


def _schema_mismatch(line_number: int, row, expected) -> SchemaError:
    for position, (got, want) in enumerate(zip(row, expected), start=1):
        if got.strip() != want:
            return SchemaError(
                f"line {line_number}: column {position} is {got.strip()!r}, "
                f"expected {want!r}"
            )
    return SchemaError(
        f"line {line_number}: expected {len(expected)} columns "
        f"({','.join(expected)}), got {len(row)}"
    )


def _parse_float(text: str, line_number: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(
            f"line {line_number}: {column} value {text.strip()!r} is not a number"
        ) from None


def _parse_direction(text: str, line_number: int) -> str:
    value = text.strip()
    if value not in _DIRECTIONS:
        raise SchemaError(
            f"line {line_number}: direction must be 'in' or 'out', got {value!r}"
        )
    return value


def _read_single_scan(rows) -> list:
    if len(rows) < 2:
        raise SchemaError("scan file ends before the z_m,direction row")
    line_number, row = rows[1]
    if len(row) != 2:
        raise SchemaError(
            f"line {line_number}: expected z and direction values, got {len(row)} columns"
        )
    z = _parse_float(row[0], line_number, "z_m")
    direction = _parse_direction(row[1], line_number)
    body = rows[2:]
    if body and [cell.strip() for cell in body[0][1]] == SAMPLE_HEADER:
        body = body[1:]
    positions = []
    powers = []
    for line_number, row in body:
        if len(row) != 2:
            raise _schema_mismatch(line_number, row, SAMPLE_HEADER)
        positions.append(_parse_float(row[0], line_number, SAMPLE_HEADER[0]))
        powers.append(_parse_float(row[1], line_number, SAMPLE_HEADER[1]))
    return [
        KnifeEdgeScan(
            z=z,
            blade_positions=np.array(positions),
            powers=np.array(powers),
            direction=direction,
        )
    ]


def _read_combined_scans(rows) -> list:
    groups: dict = {}
    order = []
    for line_number, row in rows[1:]:
        if len(row) != 4:
            raise _schema_mismatch(line_number, row, COMBINED_HEADER)
        z = _parse_float(row[0], line_number, COMBINED_HEADER[0])
        position = _parse_float(row[1], line_number, COMBINED_HEADER[1])
        power = _parse_float(row[2], line_number, COMBINED_HEADER[2])
        direction = _parse_direction(row[3], line_number)
        key = (z, direction)
        if key not in groups:
            groups[key] = ([], [])
            order.append(key)
        groups[key][0].append(position)
        groups[key][1].append(power)
    scans = []
    for z, direction in order:
        positions, powers = groups[(z, direction)]
        scans.append(
            KnifeEdgeScan(
                z=z,
                blade_positions=np.array(positions),
                powers=np.array(powers),
                direction=direction,
            )
        )
    return scans


def read_scans_csv(path) -> list:
    """Parse a scan CSV (single-scan or combined schema) into scans.

    The schema is chosen by the header row; anything else raises
    SchemaError naming the offending column and line.
    """
    text = Path(path).read_text()
    rows = [
        (number, row)
        for number, row in enumerate(csv.reader(io.StringIO(text)), start=1)
        if row
    ]
    if not rows:
        raise SchemaError("empty scan file")
    header = [cell.strip() for cell in rows[0][1]]
    if header == SCAN_HEADER:
        return _read_single_scan(rows)
    if header == COMBINED_HEADER:
        if len(rows) < 2:
            raise SchemaError("combined scan file has a header but no samples")
        return _read_combined_scans(rows)
    expected = SCAN_HEADER if len(header) <= 2 else COMBINED_HEADER
    raise _schema_mismatch(rows[0][0], rows[0][1], expected)


def caustic_curve_csv_text(
    fit: CausticFit, wavelength: float, z_min: float, z_max: float, n_points: int = 201
) -> str:
    """Fitted caustic sampled on a uniform z grid (plot data)."""
    if not (z_max > z_min):
        raise DomainError("z_max must exceed z_min")
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    grid = np.linspace(z_min, z_max, n_points)
    radii = caustic_radius(grid, fit.w0, fit.m2, fit.z0, wavelength)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CAUSTIC_CURVE_CSV_HEADER)
    for z, radius in zip(grid, radii):
        writer.writerow([f"{z:.17g}", f"{radius:.17g}"])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# report assembly


def waist_point_report(point: WaistPoint) -> dict:
    return {
        "z_m": point.z,
        "w_m": point.w,
        "w_uncertainty_m": point.w_uncertainty,
        "direction": point.direction,
    }


def caustic_fit_report(fit: CausticFit, points=None, wavelength: float | None = None) -> dict:
    """Plain-dict summary of a caustic fit for JSON emission.

    Includes per-point model residuals (w - model w) when points are
    given and derived beam parameters when the wavelength is given.
    """
    report = {
        "parameters": {
            "w0_m": fit.w0,
            "m2": fit.m2,
            "z0_m": fit.z0,
            "direction_offset_m": fit.direction_offset,
        },
        "uncertainties": {
            "w0_m": fit.w0_uncertainty,
            "m2": fit.m2_uncertainty,
            "z0_m": fit.z0_uncertainty,
            "direction_offset_m": fit.direction_offset_uncertainty,
        },
        "covariance": [[float(value) for value in row] for row in fit.covariance],
        "covariance_order": ["w0_m", "m2", "z0_m", "direction_offset_m"],
        "warnings": list(fit.warnings),
    }
    if points is not None and wavelength is not None:
        entries = []
        for point in points:
            ind = 1.0 if point.direction == "in" else 0.0
            model = math.sqrt(
                float(
                    caustic_squared_model(
                        point.z,
                        ind,
                        fit.w0,
                        fit.m2,
                        fit.z0,
                        fit.direction_offset,
                        wavelength,
                    )
                )
            )
            entry = waist_point_report(point)
            entry["model_w_m"] = model
            entry["residual_m"] = point.w - model
            entries.append(entry)
        report["points"] = entries
    if wavelength is not None:
        derived = derived_beam_parameters(fit, wavelength)
        report["derived"] = {
            "divergence_half_angle_rad": derived["divergence_half_angle"],
            "rayleigh_range_m": derived["rayleigh_range"],
        }
    return report


def bundled_caustic_dataset_path() -> Path:
    """Path of the packaged synthetic knife-edge dataset (combined CSV)."""
    return Path(__file__).resolve().parent / "data" / "caustic_scans.csv"
