"""
Estimation
==========

Local-Gauss contrast, its minimization, the benchmark closed form and the
Fisher information.
"""

from .contrast import (
    ContrastWorkspace,
    residuals,
    residual_pk,
    contrast,
    contrast_parts,
    contrast_gradient,
)
from .optimizer import EstimationResult, minimize_contrast
from .closed_form import closed_form_benchmark, closed_form_from_workspace
from .fisher import FisherInfo, fisher_info, standardized_errors

__all__ = [
    "ContrastWorkspace",
    "residuals",
    "residual_pk",
    "contrast",
    "contrast_parts",
    "contrast_gradient",
    "EstimationResult",
    "minimize_contrast",
    "closed_form_benchmark",
    "closed_form_from_workspace",
    "FisherInfo",
    "fisher_info",
    "standardized_errors",
]
