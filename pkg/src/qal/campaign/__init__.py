"""Active-learning campaigns over a dataset oracle."""

from .analysis import AggregateTrajectory, aggregate_runs, cycles_to_optimum, kde, silverman_bandwidth
from .config import (
    ACQUISITIONS,
    OBJECTIVES,
    AcquisitionConfig,
    CampaignConfig,
    InitConstraint,
    PreprocessConfig,
    UncertaintyConfig,
    config_from_dict,
    config_to_dict,
)
from .dataset import Dataset, read_dataset_csv, write_dataset_csv
from .loop import (
    CampaignResult,
    CycleRecord,
    RunResult,
    cycle_seed,
    init_pool,
    preprocess,
    run_campaign,
    run_seed,
    run_single,
)
from .results import emit_results
from .standins import STANDINS, standin_dataset
from .synthetic import KINDS, homotop_dataset, nn_local_minima, synthetic_dataset

__all__ = [
    "AggregateTrajectory", "aggregate_runs", "cycles_to_optimum", "kde", "silverman_bandwidth",
    "ACQUISITIONS", "OBJECTIVES", "AcquisitionConfig", "CampaignConfig", "InitConstraint",
    "PreprocessConfig", "UncertaintyConfig", "config_from_dict", "config_to_dict",
    "Dataset", "read_dataset_csv", "write_dataset_csv",
    "CampaignResult", "CycleRecord", "RunResult", "cycle_seed", "init_pool", "preprocess",
    "run_campaign", "run_seed", "run_single",
    "emit_results", "STANDINS", "standin_dataset",
    "KINDS", "homotop_dataset", "nn_local_minima", "synthetic_dataset",
]
