"""Materials descriptors and feature preprocessing."""

from .perovskite import (
    O_RADIUS,
    PROPERTIES,
    DoublePerovskiteComposition,
    IonPropertyTable,
    IonRecord,
    PerovskiteComposition,
    double_feature_names,
    double_perovskite_descriptor,
    parse_site,
    single_feature_names,
    single_perovskite_descriptor,
    tolerance_factors,
    weighted_properties,
)
from .preprocessing import PcaState, ScalerState, pca_fit, pca_transform, scale_transform, standard_scale
from .structure import (
    MbtrGrid,
    Structure,
    XyzParseError,
    comment_energy,
    format_xyz,
    mbtr_channels,
    mbtr_feature_names,
    mbtr_k2,
    parse_xyz,
    read_xyz,
    spin_descriptor,
)

__all__ = [
    "O_RADIUS", "PROPERTIES", "DoublePerovskiteComposition", "IonPropertyTable", "IonRecord",
    "PerovskiteComposition", "double_feature_names", "double_perovskite_descriptor", "parse_site",
    "single_feature_names", "single_perovskite_descriptor", "tolerance_factors", "weighted_properties",
    "PcaState", "ScalerState", "pca_fit", "pca_transform", "scale_transform", "standard_scale",
    "MbtrGrid", "Structure", "XyzParseError", "comment_energy", "format_xyz", "mbtr_channels",
    "mbtr_feature_names", "mbtr_k2", "parse_xyz", "read_xyz", "spin_descriptor",
]
