"""Outage, transmit power and energy per bit of relayed power-line links.

Log-normal fading, Bernoulli-Gaussian impulsive noise; single-hop,
decode-and-forward multi-hop and incremental DF schemes, with a Monte Carlo
simulator for cross-checking the closed forms.
"""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    AttenuationParams,
    FadingParams,
    LinkSpec,
    NoiseParams,
    attenuation,
    lognormal_sq_cdf,
    noise_threshold,
    sample_channel_gain_sq,
)
from .energy import (  # noqa: E402
    EnergyReport,
    ModemPowerProfile,
    energy_idf,
    energy_multihop,
    energy_single_hop,
)
from .montecarlo import (  # noqa: E402
    SimConfig,
    SimEstimate,
    simulate_idf_outage,
    simulate_link_outage,
    simulate_multihop_outage,
)
from .outage import (  # noqa: E402
    OutageBreakdown,
    Topology,
    idf_outage,
    link_outage,
    multihop_outage,
    single_hop_outage,
)
from .power import (  # noqa: E402
    PowerSolution,
    SolverError,
    solve_idf,
    solve_multihop,
    solve_single_hop,
)
