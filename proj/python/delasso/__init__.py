"""Debiased-lasso inference for high-dimensional linear regression."""

from ._core import (
    ConfigError,
    DomainError,
    NotPositiveDefinite,
    ShapeMismatch,
    fit,
    infty_k_norm,
    ks_statistic_normal,
    lasso,
    nodewise_precision,
    phi_max,
    power_function,
    re_constant,
    scaled_lasso,
    simulate,
    std_normal_cdf,
    std_normal_quantile,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NotPositiveDefinite",
    "ShapeMismatch",
    "fit",
    "infty_k_norm",
    "ks_statistic_normal",
    "lasso",
    "nodewise_precision",
    "phi_max",
    "power_function",
    "re_constant",
    "scaled_lasso",
    "simulate",
    "std_normal_cdf",
    "std_normal_quantile",
]
