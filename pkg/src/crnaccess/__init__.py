"""Markov-chain toolkit for prioritized cognitive-radio channel access.

Two continuous-time models of SU/PU channel sharing (basic random access
and reservation access with channel aggregation), their stationary
solutions, performance metrics, an independent discrete-event simulation
oracle, and a sweep CLI.
"""

__version__ = "0.1.0"

from .basic import (basic_transitions, build_basic_generator, enumerate_basic,
                    su1_blocked, su2_blocked)
from .generator import Event, Generator, GeneratorBuildError
from .metrics import (MetricsReport, blocking, capacity, compute_metrics,
                      handoff, state_count_basic, state_count_reservation,
                      state_count_reservation_formula, utilization)
from .params import (MODEL_BASIC, MODEL_RESERVATION, MODELS, ParamError,
                     SystemParams, load_params, params_from_dict,
                     validate_params)
from .reservation import (build_reservation_generator, enumerate_reservation,
                          reservation_transitions)
from .sim import (ConfigInvalid, SimConfig, SimEstimate, simulate,
                  verify_event_tables)
from .solver import (Method, NoConvergence, ResidualTooLarge, SingularMatrix,
                     SolverError, StationaryDistribution, export_pi_csv,
                     solve_direct, solve_uniformization)
from .states import BasicState, ReservationState, StateSpace
from .sweep import (SweepError, SweepSpec, report_complexity,
                    reservation_count_report, run_sweep, solve_model)
