"""Posting-time mixtures and retweet-growth curves for social network users.

Two models drive everything here: a two-component Gaussian mixture over the
time of day at which a user posts (fit by EM), and a logarithmic curve for the
cumulative retweet count of one message versus its age (fit by
Levenberg-Marquardt).  Both feed prediction helpers and a crawl scheduler.
"""

from .binning import Histogram, Pattern, bin_events, time_of_day
from .errors import (
    DegenerateDataError,
    DomainError,
    InsufficientDataError,
    MonotonicityError,
    NumericalFailure,
    OsnError,
    ParseError,
    StoreVersionError,
    UnreachableTargetError,
)
from .gmm import EmConfig, GmmFit, em_step, fit_gmm, gmm_density
from .loggrowth import (
    LogGrowthFit,
    LsConfig,
    fit_log_growth,
    log_growth_value,
    residuals_and_jacobian,
    to_paper_params,
)
from .predictor import (
    HourInterval,
    expected_count,
    peak_times,
    predict_retweets,
    time_to_reach,
)
from .records import EventRecord, RetweetObservation, load_observations, parse_event_line
from .scheduler import PollPlan, SimResult, allocate_polls, next_poll_time, poll_times, simulate
from .store import ModelStore, load_store, save_store
from .synth import SynthSpec, generate_synthetic_events, generate_synthetic_growth

__version__ = "0.1.0"
