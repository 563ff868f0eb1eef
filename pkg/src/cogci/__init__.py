"""Symbol-level constructive-interference precoding for an underlay cognitive MISO downlink."""

__version__ = "0.1.0"

from .scenario import (  # noqa: E402
    UNBOUNDED,
    ChannelSet,
    DegenerateChannelError,
    ScenarioConfig,
    generate_channels,
    load_config,
    make_primary_beamformer,
)
from .constellation import (  # noqa: E402
    PskAlphabet,
    SymbolVector,
    cross_correlation,
    detect,
    draw_symbols,
    is_constructive,
)
from .ci_precoder import (  # noqa: E402
    PrecodeSolution,
    Status,
    make_projector,
    precode,
    solve_ccipm,
    solve_ccipm_strict,
)
from .baselines import BoundSolution, CcizfConfig, solve_ccizf, solve_multicast_bound  # noqa: E402
from .evaluation import (  # noqa: E402
    audit_solution,
    energy_efficiency,
    rate_to_modulation,
    simulate_slot,
)
from .harness import SweepSpec, SweepVariable, run_sweep, write_csv  # noqa: E402
