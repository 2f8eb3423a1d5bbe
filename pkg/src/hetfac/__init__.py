"""Constrained heterogeneous two-facility location on the line, Max-variant costs.

Exact-arithmetic mechanisms, brute-force optima and deviation/ratio audits.
"""

from .model import (
    Agent,
    Instance,
    InstanceError,
    Objective,
    Placement,
    Preference,
    SettingError,
    agent_cost,
    max_cost,
    partition_by_preference,
    statistics,
    sum_cost,
)
from .zones import ZoneMap, build_zone_map, pair_cost, peak_of
from .oracle import OptResult, brute_force_opt, opt_max_center_peak, opt_sum_in_ap
from .mechanisms import (
    M1,
    M2,
    M3,
    M4,
    MC,
    OPT_MC,
    OPT_SC,
    SC,
    Mechanism,
    mc_mechanism,
    mechanism_1,
    mechanism_2,
    mechanism_3,
    mechanism_4,
    order_stat,
    run,
    sc_mechanism,
)

__version__ = "0.1.0"
