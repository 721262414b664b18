"""Fatigue damage estimation: rainflow/Miner, spectral rates, Markov
turning-point simulation and Preisach relay banks on load time series."""

__version__ = "0.1.0"

from .errors import (DataError, DegenerateSignal, DomainError, FatigueError, NonFiniteValue,
                     NonMonotoneTime, OutOfGrid)
from .signal import (DiscreteTPSeries, LevelGrid, TimeSeries, TurningPoints, discretize,
                     extract_turning_points, load_series)
from .rainflow import Cycle, RainflowMatrix, build_rfm, count_cycles, histograms
from .damage import DamageSeries, SNCurve, cycles_to_failure, damage_series, edl, miner_damage
from .spectral import (PSD, BandwidthParams, SpectralMoments, bandwidth_params,
                       benasciutti_rate, estimate_psd, narrowband_rate, spectral_moments)
from .markov import IntensityMatrix, MarkovModel, intensity, mc_damage, rfm_to_markov, simulate
from .hysteresis import (Relay, RelayBank, accumulated_damage, calibrate_to_reference,
                         make_paper_bank, make_uniform_bank, preisach_bound, relay_step,
                         stream_update)
from .harness import ComparisonReport, RunConfig, parse_config, run_compare
