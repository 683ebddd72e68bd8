from .experiment import (
    ExperimentConfig,
    TrialReport,
    TrialResult,
    load_config,
    parse_config,
    run_experiment,
    run_trial,
)
from .extremal import brute_force_longest_cycle, brute_force_longest_path, certificate_bound
from .scan import Crossing, ScanTable, crossing_scan, default_grid
from .stats import folded_histogram, tv_distance
