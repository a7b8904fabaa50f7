"""Improper Gaussian signaling for an underlay SU sharing spectrum with a full-duplex PU."""

from .core import (ChannelDraw, ChannelMeans, EeConfig, PuConfig, RateThresholds, SignalParams,
                   SuConfig, circularity_coefficients, db_to_linear, linear_to_db, paper_defaults,
                   pu_rate, rate_threshold, su_rate)
from .design_acsi import DesignOutcome, algorithm_I, algorithm_II
from .design_idlcsi import (DlDecision, avg_ee_acsi, avg_ee_dl, design_idlcsi,
                            power_saving_probability, pu_outage_dl, su_outage_dl)
from .montecarlo import McEstimate, SeedSpec
from .outage import (QuadratureError, pu_outage_exact_numeric, pu_outage_proper_exact,
                     pu_outage_upper_bound, su_outage_acsi, su_outage_acsi_max_improper)

__version__ = "0.1.0"
