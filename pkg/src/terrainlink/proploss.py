"""Path-loss and received-power models.

Received-power functions work in linear units (watts); loss functions
return positive dB. The terrain model at the bottom combines the
line-of-sight, knife-edge and troposcatter mechanisms over a
:class:`~terrainlink.terrain.TerrainProfile`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .errors import DomainError, RangeError, SingularityError
from .limits import check_range
from .terrain import (
    LinkGeometry,
    Polarization,
    TerrainProfile,
    diffraction_parameter,
    los_clearance,
)

FOUR_PI = 4.0 * math.pi


class PropagationMode(enum.Enum):
    LINE_OF_SIGHT = "LineOfSight"
    DIFFRACTION = "Diffraction"
    TROPOSCATTER = "Troposcatter"
    COMBINED = "Combined"


@dataclass(frozen=True)
class GroundParameters:
    relative_permittivity: float
    conductivity_S_per_m: float

    def __post_init__(self):
        check_range("PERMIT", self.relative_permittivity)
        check_range("CONDUC", self.conductivity_S_per_m)


GROUND_PRESETS = {
    "average": GroundParameters(15.0, 0.005),
    "poor": GroundParameters(4.0, 0.001),
    "good": GroundParameters(25.0, 0.020),
    "fresh_water": GroundParameters(81.0, 0.010),
    "sea_water": GroundParameters(81.0, 5.000),
}


def ground_preset(name: str) -> GroundParameters:
    try:
        return GROUND_PRESETS[name.strip().lower().replace(" ", "_").replace("-", "_")]
    except KeyError:
        raise DomainError(
            f"unknown ground preset {name!r}; choose from {', '.join(GROUND_PRESETS)}"
        ) from None


@dataclass(frozen=True)
class AtmosphereParameters:
    """Surface refractivity and humidity are range-checked but unused by the loss formulas."""

    surface_refractivity_N: float = 301.0
    humidity_g_per_m3: float = 10.0
    climate_M_dB: float = 30.0

    def __post_init__(self):
        check_range("REFRAC", self.surface_refractivity_N)
        check_range("HUMID", self.humidity_g_per_m3)
        if not 19.0 <= self.climate_M_dB <= 40.0:
            raise RangeError(
                "CLIMATE_M", self.climate_M_dB,
                f"{self.climate_M_dB} dB outside troposcatter climate range [19, 40] dB",
            )


@dataclass(frozen=True)
class TroposcatterInputs:
    M_dB: float
    frequency_MHz: float
    distance_km: float
    scatter_angle_mrad: float
    common_volume_term_LN_dB: float = 0.0
    coupling_loss_LC_dB: float = 0.0
    gain_tx_dBi: float = 0.0
    gain_rx_dBi: float = 0.0


@dataclass(frozen=True)
class PathLossBreakdown:
    L_o_dB: float
    L_l_dB: float
    L_md_dB: float
    L_r_dB: float
    total_dB: float
    mode: PropagationMode


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power (W), linear antenna gains and linear system loss."""

    tx_power_W: float
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    system_loss_L: float = 1.0

    def __post_init__(self):
        if not self.tx_power_W > 0:
            raise DomainError(f"transmit power must be positive, got {self.tx_power_W} W")
        if not (self.gain_tx > 0 and self.gain_rx > 0):
            raise DomainError("antenna gains must be positive")
        if not self.system_loss_L >= 1.0:
            raise DomainError(f"system loss must be >= 1, got {self.system_loss_L}")


def _check_distance(distance_m: float):
    if distance_m == 0:
        raise SingularityError("received power is singular at zero distance")
    if not distance_m > 0:
        raise DomainError(f"distance must be positive, got {distance_m} m")


def free_space_received_power(budget: LinkBudget, wavelength_m: float, distance_m: float) -> float:
    _check_distance(distance_m)
    b = budget
    return (b.tx_power_W * b.gain_tx * b.gain_rx * wavelength_m**2
            / (FOUR_PI**2 * distance_m**2 * b.system_loss_L))


def free_space_loss_db(wavelength_m: float, distance_m: float) -> float:
    """Isotropic free-space loss 20*log10(4*pi*d/lambda)."""
    _check_distance(distance_m)
    return 20.0 * math.log10(FOUR_PI * distance_m / wavelength_m)


def two_ray_received_power(
    budget: LinkBudget,
    tx_height_m: float,
    rx_height_m: float,
    distance_m: float,
    strict: bool = False,
) -> float:
    """Far-field plane-earth two-ray received power.

    The default uses squared antenna heights, P_t G_t G_r h_t^2 h_r^2 / d^4.
    ``strict=True`` uses the unsquared product h_t h_r instead. System loss is
    not applied in either form.
    """
    _check_distance(distance_m)
    if not (tx_height_m > 0 and rx_height_m > 0):
        raise DomainError("antenna heights must be positive")
    heights = tx_height_m * rx_height_m
    if not strict:
        heights = heights**2
    return budget.tx_power_W * budget.gain_tx * budget.gain_rx * heights / distance_m**4


def los_two_ray_ratio(wavelength_m: float, r1_m: float, r2_m: float, reflection_R: complex) -> float:
    """P_r/P_t for a direct ray of length r1 plus a reflected ray of length r2."""
    if not (r1_m > 0 and r2_m > 0):
        raise DomainError("ray path lengths must be positive")
    k = 2.0 * math.pi / wavelength_m
    field = cmath.exp(-1j * k * r1_m) / r1_m + reflection_R * cmath.exp(-1j * k * r2_m) / r2_m
    return (wavelength_m / FOUR_PI) ** 2 * abs(field) ** 2


def knife_edge_loss(nu: float) -> float:
    """Single knife-edge loss in excess of free space, in dB."""
    if nu < 0:
        return 0.0
    if nu <= 2.4:
        return 6.0 + 9.0 * nu + 1.27 * nu**2
    return 13.0 + 20.0 * math.log10(nu)


def troposcatter_loss(inputs: TroposcatterInputs) -> float:
    """Empirical median troposcatter loss (dB); f in MHz, d in km, angle in mrad."""
    t = inputs
    for name, value in (("frequency", t.frequency_MHz), ("distance", t.distance_km),
                        ("scatter angle", t.scatter_angle_mrad)):
        if not value > 0:
            raise DomainError(f"troposcatter {name} must be positive, got {value}")
    return (t.M_dB
            + 30.0 * math.log10(t.frequency_MHz)
            + 10.0 * math.log10(t.distance_km)
            + 30.0 * math.log10(t.scatter_angle_mrad)
            + t.common_volume_term_LN_dB
            + t.coupling_loss_LC_dB
            - t.gain_tx_dBi
            - t.gain_rx_dBi)


def total_path_loss(
    L_o: float,
    L_l: float = 0.0,
    L_md: float = 0.0,
    L_r: float = 0.0,
    mode: PropagationMode = PropagationMode.LINE_OF_SIGHT,
) -> PathLossBreakdown:
    for name, value in (("L_o", L_o), ("L_l", L_l), ("L_md", L_md), ("L_r", L_r)):
        if not value >= 0:
            raise DomainError(f"loss component {name} must be >= 0 dB, got {value}")
    return PathLossBreakdown(L_o, L_l, L_md, L_r, L_o + L_l + L_md + L_r, mode)


def reflection_coefficient(
    ground: GroundParameters,
    polarization: Polarization,
    grazing_angle_rad: float,
    frequency_MHz: float,
) -> complex:
    """Plane-wave reflection coefficient of a smooth, finitely conducting earth."""
    if not 0.0 < grazing_angle_rad <= math.pi / 2:
        raise DomainError(f"grazing angle {grazing_angle_rad} rad outside (0, pi/2]")
    wavelength = 299792458.0 / (frequency_MHz * 1e6)
    eps = complex(ground.relative_permittivity, -60.0 * wavelength * ground.conductivity_S_per_m)
    s = math.sin(grazing_angle_rad)
    root = cmath.sqrt(eps - math.cos(grazing_angle_rad) ** 2)
    if polarization is Polarization.HORIZONTAL:
        return (s - root) / (s + root)
    return (eps * s - root) / (eps * s + root)


def flat_earth_rays(tx_height_m: float, rx_height_m: float, distance_m: float):
    """Direct length, reflected length and grazing angle over a flat reflector."""
    r1 = math.hypot(distance_m, tx_height_m - rx_height_m)
    r2 = math.hypot(distance_m, tx_height_m + rx_height_m)
    grazing = math.atan2(tx_height_m + rx_height_m, distance_m)
    return r1, r2, grazing


def los_two_ray_loss_db(geom: LinkGeometry, ground: GroundParameters, distance_m: float | None = None) -> float:
    """Positive dB loss of the direct-plus-ground-reflected field."""
    d = geom.path_length_m if distance_m is None else distance_m
    r1, r2, psi = flat_earth_rays(geom.tx_height_m, geom.rx_height_m, d)
    R = reflection_coefficient(ground, geom.polarization, psi, geom.frequency_MHz)
    ratio = los_two_ray_ratio(geom.wavelength_m, r1, r2, R)
    if ratio == 0.0:
        return math.inf
    return -10.0 * math.log10(ratio)


def scatter_angle_mrad(profile: TerrainProfile, geom: LinkGeometry) -> float:
    """Angle between the two terrain horizon rays, flat-earth geometry."""
    ds, es = profile.distances_m, profile.elevations_m
    D = profile.path_length_m
    tx_tip = es[0] + geom.tx_height_m
    rx_tip = es[-1] + geom.rx_height_m
    rx_at_tx = math.atan2(rx_tip - tx_tip, D)
    theta_t = max([rx_at_tx] + [math.atan2(e - tx_tip, d) for d, e in zip(ds[1:-1], es[1:-1])])
    theta_r = max([-rx_at_tx] + [math.atan2(e - rx_tip, D - d) for d, e in zip(ds[1:-1], es[1:-1])])
    return 1000.0 * (theta_t + theta_r)


COMBINED_WINDOW_DB = 3.0


def tirem_path_loss(
    profile: TerrainProfile,
    geom: LinkGeometry,
    ground: GroundParameters,
    atmosphere: AtmosphereParameters,
    *,
    local_screen_db: float = 0.0,
    reflection_db: float = 0.0,
    common_volume_db: float = 0.0,
    coupling_loss_db: float = 0.0,
) -> PathLossBreakdown:
    """Terrain-integrated basic path loss (antenna gains excluded).

    A clear path uses the direct-plus-reflected field. An obstructed path
    takes the lower of free space plus knife-edge loss and the troposcatter
    median loss, never below free space. ``local_screen_db`` and
    ``reflection_db`` are added as the local-screen and reflection terms.
    """
    # inputs are range-checked by the dataclasses; re-check in case callers bypassed them
    check_range("PROPFQ", geom.frequency_MHz)
    check_range("TANTHT", geom.tx_height_m)
    check_range("RANTHT", geom.rx_height_m)
    check_range("PERMIT", ground.relative_permittivity)
    check_range("CONDUC", ground.conductivity_S_per_m)
    check_range("REFRAC", atmosphere.surface_refractivity_N)
    check_range("HUMID", atmosphere.humidity_g_per_m3)

    report = los_clearance(profile, geom)
    D = geom.path_length_m
    if report.has_los:
        return total_path_loss(
            los_two_ray_loss_db(geom, ground), local_screen_db, 0.0, reflection_db,
            mode=PropagationMode.LINE_OF_SIGHT,
        )

    fspl = free_space_loss_db(geom.wavelength_m, D)
    nu = diffraction_parameter(report.dominant_obstacle, geom.wavelength_m)
    diffraction_total = fspl + knife_edge_loss(nu)
    tropo_total = troposcatter_loss(TroposcatterInputs(
        M_dB=atmosphere.climate_M_dB,
        frequency_MHz=geom.frequency_MHz,
        distance_km=D / 1000.0,
        scatter_angle_mrad=scatter_angle_mrad(profile, geom),
        common_volume_term_LN_dB=common_volume_db,
        coupling_loss_LC_dB=coupling_loss_db,
    ))

    if abs(diffraction_total - tropo_total) <= COMBINED_WINDOW_DB:
        mode = PropagationMode.COMBINED
    elif diffraction_total < tropo_total:
        mode = PropagationMode.DIFFRACTION
    else:
        mode = PropagationMode.TROPOSCATTER
    excess = max(min(diffraction_total, tropo_total) - fspl, 0.0)
    return total_path_loss(fspl, local_screen_db, excess, reflection_db, mode=mode)
