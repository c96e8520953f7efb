"""Kernel regressors, resampling uncertainty, grid search and error metrics."""

from .gpr import GprModel, fit_gpr, predict_gpr
from .gridsearch import REFERENCE_GRIDS, GridCell, GridSearchResult, grid_search, write_grid_csv
from .metrics import holdout_report, mae, train_test_split
from .surrogate import Surrogate
from .svr import SvrModel, fit_svr, predict_svr, svr_dual_objective
from .uncertainty import (
    UncertaintyEstimate,
    bootstrap_uncertainty,
    cv_uncertainty,
    estimate,
    gpr_uncertainty,
    summarize_predictions,
)

__all__ = [
    "GprModel", "fit_gpr", "predict_gpr",
    "REFERENCE_GRIDS", "GridCell", "GridSearchResult", "grid_search", "write_grid_csv",
    "holdout_report", "mae", "train_test_split",
    "Surrogate",
    "SvrModel", "fit_svr", "predict_svr", "svr_dual_objective",
    "UncertaintyEstimate", "bootstrap_uncertainty", "cv_uncertainty", "estimate",
    "gpr_uncertainty", "summarize_predictions",
]
