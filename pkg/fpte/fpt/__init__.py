from fpte.fpt.moments import (
    MomentCurve,
    fpt_curve,
    mean_fpt_entrance,
    mean_fpt_from_boundary,
    mean_fpt_regular,
    moments_fpt_entrance,
    moments_fpt_from_boundary,
    moments_fpt_regular,
)

__all__ = [
    "MomentCurve",
    "fpt_curve",
    "mean_fpt_entrance",
    "mean_fpt_from_boundary",
    "mean_fpt_regular",
    "moments_fpt_entrance",
    "moments_fpt_from_boundary",
    "moments_fpt_regular",
]
