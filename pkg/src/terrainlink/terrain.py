"""Elevation profiles, line-of-sight tests and knife-edge geometry.

Profiles are plain CSV files with header ``distance_m,elevation_m``; the
distance column is measured along the great-circle path from the
transmitter site. No earth curvature is applied: the sightline between the
two antenna tips is a straight line in (distance, elevation) space.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, field

from .errors import GeometryError, ProfileParseError
from .limits import check_range

PROFILE_HEADER = ("distance_m", "elevation_m")
SPEED_OF_LIGHT = 299792458.0


class Polarization(enum.Enum):
    VERTICAL = "V"
    HORIZONTAL = "H"

    @classmethod
    def parse(cls, text: str) -> "Polarization":
        key = text.strip().upper()
        for member in cls:
            if key in (member.value, member.name):
                return member
        raise GeometryError(f"POLARZ: unknown polarization {text!r}, expected 'V' or 'H'")


@dataclass(frozen=True)
class TerrainProfile:
    """Ordered terrain samples along the path.

    The first sample sits at distance 0 (the transmitter site) and the last
    one at the receiver; distances are strictly increasing.
    """

    distances_m: tuple[float, ...]
    elevations_m: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "distances_m", tuple(float(d) for d in self.distances_m))
        object.__setattr__(self, "elevations_m", tuple(float(e) for e in self.elevations_m))
        if len(self.distances_m) != len(self.elevations_m):
            raise GeometryError("distance and elevation arrays differ in length")
        check_range("NPRFL", len(self.distances_m))
        for d in self.distances_m:
            check_range("XPRFL", d)
        for e in self.elevations_m:
            check_range("HPRFL", e)
        if self.distances_m[0] != 0.0:
            raise GeometryError(
                f"XPRFL: first profile point must be at distance 0, got {self.distances_m[0]}"
            )
        for prev, cur in zip(self.distances_m, self.distances_m[1:]):
            if not cur > prev:
                raise GeometryError(
                    f"XPRFL: distances must be strictly increasing ({prev} followed by {cur})"
                )

    @classmethod
    def from_points(cls, points) -> "TerrainProfile":
        points = list(points)
        return cls(tuple(p[0] for p in points), tuple(p[1] for p in points))

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.distances_m, self.elevations_m))

    @property
    def path_length_m(self) -> float:
        return self.distances_m[-1]

    def __len__(self):
        return len(self.distances_m)

    def elevation_at(self, distance_m: float) -> float:
        """Linearly interpolated terrain elevation at ``distance_m``."""
        if not 0.0 <= distance_m <= self.path_length_m:
            raise GeometryError(
                f"distance {distance_m} m outside profile [0, {self.path_length_m}] m"
            )
        ds, es = self.distances_m, self.elevations_m
        for i in range(1, len(ds)):
            if distance_m <= ds[i]:
                frac = (distance_m - ds[i - 1]) / (ds[i] - ds[i - 1])
                return es[i - 1] + frac * (es[i] - es[i - 1])
        return es[-1]

    def truncated(self, distance_m: float) -> "TerrainProfile":
        """Profile seen by a receiver located ``distance_m`` along this path.

        Samples beyond ``distance_m`` are dropped and an interpolated end
        point is appended. A midpoint is inserted if fewer than three samples
        would remain.
        """
        if distance_m == self.path_length_m:
            return self
        end = self.elevation_at(distance_m)
        pts = [(d, e) for d, e in self.points if d < distance_m]
        pts.append((distance_m, end))
        if len(pts) < 3:
            mid = distance_m / 2.0
            pts = [pts[0], (mid, self.elevation_at(mid)), pts[-1]]
        return TerrainProfile.from_points(pts)


@dataclass(frozen=True)
class LinkGeometry:
    """Antenna heights (above local terrain), carrier and path length."""

    tx_height_m: float
    rx_height_m: float
    frequency_MHz: float
    path_length_m: float
    polarization: Polarization = Polarization.VERTICAL
    wavelength_m: float = field(init=False)

    def __post_init__(self):
        check_range("TANTHT", self.tx_height_m)
        check_range("RANTHT", self.rx_height_m)
        check_range("PROPFQ", self.frequency_MHz)
        if not self.path_length_m > 0:
            raise GeometryError(f"path length must be positive, got {self.path_length_m}")
        if isinstance(self.polarization, str):
            object.__setattr__(self, "polarization", Polarization.parse(self.polarization))
        object.__setattr__(self, "wavelength_m", SPEED_OF_LIGHT / (self.frequency_MHz * 1e6))


@dataclass(frozen=True)
class ObstacleGeometry:
    """Knife edge at ``d_T_m`` from the transmitter, ``h_m`` above the sightline."""

    h_m: float
    d_T_m: float
    d_R_m: float

    def __post_init__(self):
        if not (self.d_T_m > 0 and self.d_R_m > 0):
            raise GeometryError(
                f"obstacle distances must be positive (d_T={self.d_T_m}, d_R={self.d_R_m})"
            )


@dataclass(frozen=True)
class LosReport:
    has_los: bool
    dominant_obstacle: ObstacleGeometry | None


def load_profile(source) -> TerrainProfile:
    """Parse an elevation CSV.

    ``source`` may be raw bytes, a binary or text stream, or a filesystem
    path. Errors report the 1-based line number of the offending row.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            text = fh.read().decode("utf-8")
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data

    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(h.strip() for h in header) != PROFILE_HEADER:
        raise ProfileParseError(f"expected header {','.join(PROFILE_HEADER)!r}", line=1)

    distances, elevations = [], []
    for row in rows:
        line = rows.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ProfileParseError(f"expected 2 fields, got {len(row)}", line=line)
        try:
            d, e = float(row[0]), float(row[1])
        except ValueError:
            raise ProfileParseError(f"non-numeric value in {','.join(row)!r}", line=line) from None
        if not (math.isfinite(d) and math.isfinite(e)):
            raise ProfileParseError("non-finite value", line=line)
        distances.append(d)
        elevations.append(e)
    return TerrainProfile(tuple(distances), tuple(elevations))


def dump_profile(profile: TerrainProfile) -> bytes:
    """Serialize ``profile`` to CSV bytes that :func:`load_profile` reads back exactly."""
    lines = [",".join(PROFILE_HEADER)]
    lines += [f"{d!r},{e!r}" for d, e in profile.points]
    return ("\n".join(lines) + "\n").encode("utf-8")


def sightline_height(profile: TerrainProfile, geom: LinkGeometry, distance_m: float) -> float:
    """Height of the straight TX-tip to RX-tip line above mean sea level."""
    tx_tip = profile.elevations_m[0] + geom.tx_height_m
    rx_tip = profile.elevations_m[-1] + geom.rx_height_m
    return tx_tip + (rx_tip - tx_tip) * distance_m / profile.path_length_m


def _check_lengths(profile: TerrainProfile, geom: LinkGeometry):
    if not math.isclose(profile.path_length_m, geom.path_length_m, rel_tol=1e-9):
        raise GeometryError(
            f"profile length {profile.path_length_m} m does not match "
            f"link path length {geom.path_length_m} m"
        )


def los_clearance(profile: TerrainProfile, geom: LinkGeometry) -> LosReport:
    """Test the sightline between antenna tips and locate the dominant edge.

    The dominant obstacle is the interior sample with the largest height
    above the sightline (ties go to the sample nearest the transmitter). It
    is reported even when the path is clear, with a negative ``h_m``.
    """
    _check_lengths(profile, geom)
    D = profile.path_length_m
    excess = [
        e - sightline_height(profile, geom, d)
        for d, e in zip(profile.distances_m, profile.elevations_m)
    ]
    has_los = all(x < 0 for x in excess)

    best = max(range(1, len(excess) - 1), key=lambda i: (excess[i], -i))
    d_T = profile.distances_m[best]
    obstacle = ObstacleGeometry(h_m=excess[best], d_T_m=d_T, d_R_m=D - d_T)
    return LosReport(has_los=has_los, dominant_obstacle=obstacle)


def diffraction_parameter(obstacle: ObstacleGeometry, wavelength_m: float) -> float:
    """Fresnel-Kirchhoff parameter nu = h * sqrt(2/lambda * (1/d_T + 1/d_R))."""
    if not (obstacle.d_T_m > 0 and obstacle.d_R_m > 0):
        raise GeometryError("obstacle distances must be positive")
    if not wavelength_m > 0:
        raise GeometryError(f"wavelength must be positive, got {wavelength_m}")
    return obstacle.h_m * math.sqrt((2.0 / wavelength_m) * (1.0 / obstacle.d_T_m + 1.0 / obstacle.d_R_m))
