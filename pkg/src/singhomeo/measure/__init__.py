"""Estimators tying the constructions to measurable quantities."""

from .area import (
    AreaReport,
    CoverReport,
    MassReport,
    area_report,
    box_cover_series,
    box_cover_upper,
    graph_area_pa,
    graph_area_radicands,
    mass_distribution_lower,
)
from .length import LengthAnalysis, length_analysis
from .occupation import OccupationHist, local_ratio, pushforward_hist, singularity_score
from .pa import Cell, gram_cauchy_binet, gram_direct, pa_cells
from .probes import DiffQuotientRow, OntoReport, diff_quotient_profile, onto_check

__all__ = [
    "AreaReport",
    "Cell",
    "CoverReport",
    "DiffQuotientRow",
    "LengthAnalysis",
    "MassReport",
    "OccupationHist",
    "OntoReport",
    "area_report",
    "box_cover_series",
    "box_cover_upper",
    "diff_quotient_profile",
    "graph_area_pa",
    "graph_area_radicands",
    "gram_cauchy_binet",
    "gram_direct",
    "length_analysis",
    "local_ratio",
    "mass_distribution_lower",
    "onto_check",
    "pa_cells",
    "pushforward_hist",
    "singularity_score",
]
