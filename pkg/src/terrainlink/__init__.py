"""Terrain-aware radio propagation and packet-level link simulation."""

from .errors import (
    ConfigError,
    DomainError,
    GeometryError,
    ProfileParseError,
    RangeError,
    SimulationError,
    SingularityError,
    TerrainLinkError,
)
from .fading import (
    EnvelopeTrace,
    FadingProcess,
    MultipathProfile,
    Normalization,
    RicianParameters,
    envelope_process,
    impulse_response,
    normalized_power_envelope,
    rician_amplitude,
)
from .linksim import (
    LinkStats,
    Model,
    RadioConfig,
    ReceptionRecord,
    Scenario,
    TrafficConfig,
    Verdict,
    ber_stage,
    generate_packets,
    received_power_stage,
    reception_decision,
    run_link_simulation,
    snr_stage,
)
from .proploss import (
    GROUND_PRESETS,
    AtmosphereParameters,
    GroundParameters,
    LinkBudget,
    PathLossBreakdown,
    PropagationMode,
    TroposcatterInputs,
    free_space_received_power,
    knife_edge_loss,
    los_two_ray_ratio,
    reflection_coefficient,
    tirem_path_loss,
    total_path_loss,
    troposcatter_loss,
    two_ray_received_power,
)
from .terrain import (
    LinkGeometry,
    LosReport,
    ObstacleGeometry,
    Polarization,
    TerrainProfile,
    diffraction_parameter,
    dump_profile,
    load_profile,
    los_clearance,
)

__version__ = "0.1.0"
