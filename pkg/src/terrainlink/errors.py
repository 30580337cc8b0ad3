"""Exception hierarchy shared by every terrainlink module."""


class TerrainLinkError(Exception):
    """Base class for all errors raised by this package."""


class ProfileParseError(TerrainLinkError, ValueError):
    """A terrain profile CSV could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RangeError(TerrainLinkError, ValueError):
    """A TIREM input lies outside its valid range.

    ``variable`` carries the TIREM variable name (PROPFQ, TANTHT, ...).
    """

    def __init__(self, variable: str, value, message: str):
        self.variable = variable
        self.value = value
        super().__init__(f"{variable}: {message}")


class GeometryError(TerrainLinkError, ValueError):
    """Inconsistent link or obstacle geometry."""


class DomainError(TerrainLinkError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class SingularityError(DomainError):
    """A formula was evaluated at its singular point (e.g. zero distance)."""


class ConfigError(TerrainLinkError, ValueError):
    """Invalid or unsupported scenario configuration."""


class SimulationError(TerrainLinkError):
    """A pipeline stage failed during a link simulation run."""

    def __init__(self, packet_index: int, stage: str, cause: Exception):
        self.packet_index = packet_index
        self.stage = stage
        self.cause = cause
        super().__init__(f"packet {packet_index}, {stage} stage: {cause}")
