"""
Chirp pulse-compression ranging: synthesis, room simulation, peak-selection
estimators, accuracy experiments and the receiver power budget.
"""

from .errors import (ConfigError, DomainError, GeometryError, NegativeDistanceError,
                     NoSignalError, ParameterError, ParseError, RangingError,
                     RateMismatchError)
from .signals import (ChirpSpec, NoiseSpec, Waveform, add_white_noise,
                      analytic_autocorrelation, extract_window, generate_chirp,
                      instantaneous_frequency, quantize)
from .room import (ImpulseResponse, RoomSpec, compute_rir, convolve, image_sources,
                   simulate_reception)
from .ranging import (CorrelationSeries, Scenario, TimingSpec, compression_ratio,
                      coverage, lag_to_distance, pulse_compress)
from .estimators import (DELTA_PEAK, MAXIMUM, DEFAULT_ESTIMATORS, PROMINENCE,
                         QUADRATIC_WINDOW, EstimatorSpec, Method, WindowShape, WindowSpec,
                         apply_window, estimate_distance, find_local_maxima,
                         peak_prominences, select_lag)
from .stats import (DensityEstimate, ErrorStats, empirical_cdf, epanechnikov_kde,
                    error_metrics, gaussian_fit)
from .experiments import (ExperimentConfig, GridSpec, ResultRecord, compare_estimators,
                          run_grid_sweep, run_monte_carlo, run_ppf_sweep)
from .power import RECEIVER_COMPONENTS, PowerBreakdown, battery_life, duty_cycle_power
from .io import load_results, load_waveform, save_results, save_waveform

__version__ = "0.1.0"
