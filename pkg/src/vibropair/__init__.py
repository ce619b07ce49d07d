"""Event-driven simulation and identification of a friction-coupled
active-passive pair with Hunt-Crossley vibro-impact contact."""

__version__ = "0.1.0"

from .model import (
    ChatteringError,
    Event,
    EventKind,
    Mode,
    NumericsError,
    SimState,
    SimulationError,
    SystemParams,
    Trajectory,
    preset,
    preset_names,
    sgn,
    sgn_banded,
    validate,
)
from .friction import CouplingMode, coupled_accelerations, passive_acceleration, stiction_holds
from .contact import (
    ContactSample,
    contact_force,
    contact_force_raw,
    decaying_cycle_profile,
    hysteresis_trace,
    loop_energy,
    penetration,
    restitution_coefficient,
)
from .sim import (
    BACKEND,
    IntegratorConfig,
    Scenario,
    ScenarioKind,
    apply_event,
    constant_drag,
    detect_and_locate,
    energy_series,
    idle_impulse,
    mechanical_energy,
    simulate,
    step,
)
from .signal_io import (
    CsvFormatError,
    MeasuredTrace,
    differentiate,
    export_hysteresis,
    export_measured,
    export_trajectory,
    load_csv,
    lowpass,
)
from .fit import (
    FitConfig,
    FitProblem,
    FitResult,
    fit,
    flat_parameters,
    objective,
    profile_coupling,
)

__all__ = [name for name in dir() if not name.startswith("_")]
