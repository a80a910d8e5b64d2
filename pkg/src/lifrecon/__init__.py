"""Leaky integrate-and-fire sampling, discrepancy metrics and reconstruction."""

from ._backend import BACKEND
from .discrepancy import (MERGED, PER_SEQUENCE, DiscrepancyResult,
                          event_discrepancy_bruteforce, event_discrepancy_prefix,
                          event_discrepancy_streaming, merge_events, mu_eta_interval,
                          mu_f_interval, oplus, signal_discrepancy_grid)
from .estimator import (ErrorTriple, QuasiAuditReport, SweepResult, error_triple,
                        quasi_isometry_audit, resample_error, sweep_truncation, tune)
from .exceptions import MissedCrossingError, ParameterError, SignalEvaluationError
from .reconstruction import (CoefficientSeries, ReconstructedSignal, WindowSpec,
                             estimate_coefficients, phi, psi, reconstruct)
from .samplers import (EventSequence, SamplerConfig, lif_sample,
                       refinement_deviation, sod_sample)
from .signal_core import (BandlimitedSignal, SampledGrid, generate_random_bandlimited,
                          grid_over, leaky_average_on_grid, max_norm_distance,
                          reference_leaky_average,
                          sample_grid)

__version__ = "0.1.0"
