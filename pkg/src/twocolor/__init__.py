"""Saddle-point analysis of ionisation in bichromatic laser fields.

The package finds and classifies the complex-time ionisation events of a
two-colour strong field, builds the steepest-descent contour that decides
which events contribute, and evaluates orbit-resolved photoelectron
amplitudes, yields, semi-classical trajectories and the coalescence locus
of the colour switchover.  Everything is in atomic units.
"""

from .action import ActionEvaluation, action, action_derivatives
from .amplitude import (
    OrbitAmplitude,
    SpectrumTable,
    direct_amplitude,
    orbit_yield,
    periodized_amplitude,
    prefactor,
    spectrum,
    spm_amplitude,
    spm_contribution,
    yield_vs_gamma,
)
from .contour import (
    ContourChain,
    ContourTopologyError,
    DegenerateSaddleError,
    TraceError,
    build_contour,
    contour_quadrature,
    descent_directions,
    landscape_grid,
    trace_descent_path,
)
from .field import (
    FieldConfig,
    FieldConfigError,
    config_from_lab,
    electric_field,
    keldysh_gamma,
    omega_for_keldysh,
    ponderomotive_energy,
    vector_potential,
    vector_potential_integral,
)
from .saddles import (
    SaddlePoint,
    analytic_saddles_monochromatic,
    canonical_wt,
    find_saddles,
    label_saddles,
)
from .sweeps import (
    CoalescencePoint,
    CoalescenceError,
    ContinuationError,
    continue_saddles,
    find_coalescence,
    rstar_curve,
    track_saddles,
)
from .tables import SweepTable
from .trajectory import TrajectoryRecord, displacement, trajectory, trajectory_band
from .units import convert_units

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
