"""Consensus filtering on directed networks with disturbed measurements.

Simulation, spectral analysis, ISS envelopes and coherence statistics for
a distributed estimation scheme where every node fuses its own and its
neighbors' noisy measurements through a minimum-energy criterion.
"""

__version__ = "0.1.0"

from .analysis import (ComparisonResult, CoherenceReport, EquilibriumPrediction,
                       GlobalSystem, ISSBound, SpectralReport,
                       analytical_coherence, assemble_global,
                       deviation_series, disagreement_norms,
                       disagreement_state, empirical_deviation,
                       exp_bound_constants, iss_envelope, left_null_vector_of,
                       phi_max, predict_equilibrium, run_comparison,
                       spectral_report)
from .disturbances import DisturbanceProfile, DisturbanceRealization, sample_disturbances
from .errors import (BoundViolationError, ConfigError, MefconError,
                     SimulationError, SolverError)
from .filtering import (EnergyBudget, FilterParams, control_input,
                        eta_star, evaluate_energy, integrate_riccati,
                        neighbor_estimate, observer_rhs, reduced_energy,
                        riccati_rhs, steady_gains, steady_state_gain,
                        uniform_params)
from .graphs import (NetworkTopology, adjacency, degree_matrix, is_balanced,
                     is_strongly_connected, laplacian, left_null_vector,
                     make_graph, standard_laplacian)
from .simulate import (ScenarioConfig, Trajectory, basic_scenario,
                       closed_loop_drift, rk4_step, simulate_classical,
                       simulate_mef, synthesize_measurements)
from .config import build_scenario, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
