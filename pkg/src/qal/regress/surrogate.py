"""Surrogate configuration: regressor x kernel x feature map x hyperparameters.

A surrogate exposes three steps so that resampling can reuse one Gram matrix
per cycle: ``gram`` over all rows, ``fit`` on a training sub-block and
``predict`` from a cross block (plus the test self-kernel for GPR).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .. import kernels
from ..qsim import FeatureMapSpec
from .gpr import fit_gpr, predict_gpr
from .svr import fit_svr, predict_svr

REGRESSORS = ("svr", "gpr")
KERNELS = ("rbf", "dot_white", "fqk", "pqk")


@dataclass(frozen=True)
class Surrogate:
    regressor: str = "svr"
    kernel: str = "rbf"
    feature_map: FeatureMapSpec | None = None
    C: float = 1000.0
    epsilon: float = 0.01
    tol: float = 1e-3
    max_iter: int = 1_000_000
    rbf_gamma: float = 0.1
    sigma0_sq: float = 1.0
    white_noise: float = 10.0
    pqk_gamma: float = 1.0
    sigma_reg: float = 1e-3
    jitter: float = 1e-10

    def __post_init__(self):
        if self.regressor not in REGRESSORS:
            raise ValueError(f"unknown regressor {self.regressor!r}; expected one of {REGRESSORS}")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {KERNELS}")
        if self.is_quantum and self.feature_map is None:
            raise ValueError(f"kernel {self.kernel} needs a feature map")
        if not self.C > 0 or self.epsilon < 0 or not self.tol > 0:
            raise ValueError("need C > 0, epsilon >= 0, tol > 0")
        if not self.rbf_gamma > 0 or not self.pqk_gamma > 0:
            raise ValueError("kernel gammas must be positive")
        if self.sigma0_sq < 0 or self.white_noise < 0 or self.sigma_reg < 0:
            raise ValueError("sigma0_sq, white_noise and sigma_reg must be non-negative")

    @property
    def is_quantum(self) -> bool:
        return self.kernel in ("fqk", "pqk")

    def with_params(self, **params) -> "Surrogate":
        return replace(self, **params)

    def gram(self, X, Y=None, threads: int = 1) -> np.ndarray:
        if self.kernel == "rbf":
            K = kernels.rbf_matrix(X, Y, gamma=self.rbf_gamma, threads=threads)
        elif self.kernel == "dot_white":
            K = kernels.dot_white_matrix(X, Y, self.sigma0_sq, self.white_noise, threads=threads)
        elif self.kernel == "fqk":
            K = kernels.fqk_matrix(self.feature_map, X, Y, threads=threads)
        else:
            K = kernels.pqk_matrix(self.feature_map, X, self.pqk_gamma, Y, threads=threads)
        return K.values

    def fit(self, K_train: np.ndarray, y: np.ndarray):
        if self.regressor == "svr":
            return fit_svr(K_train, y, C=self.C, epsilon=self.epsilon, tol=self.tol,
                           max_iter=self.max_iter, check_psd=False)
        return fit_gpr(K_train, y, sigma_reg=self.sigma_reg, jitter=self.jitter)

    def predict(self, model, K_cross: np.ndarray, k_diag: np.ndarray | None = None):
        """Return ``(mu, sigma)``; ``sigma`` is None for SVR."""
        if self.regressor == "svr":
            return predict_svr(model, K_cross), None
        return predict_gpr(model, K_cross, k_diag)
