"""Nonlinear solution against its linearisation at infinity"""

from dataclasses import dataclass
from typing import List

import numpy as np

from codebase.lab.asymptotics import (
    DecompositionReport,
    LimsupEstimate,
    ScalingModel,
    block_maxima,
    dyadic_blocks,
    estimate_limsup,
    non_increasing,
    verify_growth3,
)
from codebase.lab.core import solve_linear, solve_nonlinear
from codebase.lab.types import Kernel, Trajectory, as_log


@dataclass
class LinearisationReport:
    x: Trajectory
    y: Trajectory
    gap: Trajectory
    block_sups: List[float]
    representation: DecompositionReport
    x_estimate: LimsupEstimate
    h_estimate: LimsupEstimate
    slope: float

    @property
    def final_gap(self):
        return self.block_sups[-1] if self.block_sups else 0.0

    @property
    def decaying(self):
        return non_increasing(self.block_sups[-3:])

    @property
    def classification_agrees(self):
        return self.x_estimate.classification == self.h_estimate.classification

    @property
    def isimple(self):
        return {
            "slope_at_infinity": self.slope,
            "block_sups": self.block_sups,
            "final_gap": self.final_gap,
            "decaying": self.decaying,
            "representation": self.representation.isimple,
            "limsup_x": self.x_estimate.isimple,
            "limsup_H": self.h_estimate.isimple,
            "classification_agrees": self.classification_agrees,
        }


def linearisation_gap(kernel: Kernel, f, H, scale: ScalingModel, xi=0.0, **limsup):
    """|x - y|/a over dyadic blocks, y solving the equation with f(x) ~ c x

    The linear comparison uses the kernel c k, c = lim f(x)/x.
    """
    horizon = H.end
    linear_kernel = kernel if f.linear_at_infinity else kernel.scaled(f.slope_at_infinity)
    x = solve_nonlinear(kernel, f, H, xi, horizon)
    y = solve_linear(linear_kernel, H, xi, horizon)

    x_log, y_log = as_log(x), as_log(y)
    # difference taken relative to the larger magnitude
    ref = np.maximum(x_log.log_abs, y_log.log_abs)
    ref = np.where(np.isfinite(ref), ref, 0.0)
    diff = x_log.sign * np.exp(x_log.log_abs - ref) - y_log.sign * np.exp(y_log.log_abs - ref)
    with np.errstate(divide="ignore"):
        diff_log = np.log(np.abs(diff)) + ref
    lo = max(1, scale.a.start)
    a_win = scale.a.window(lo, horizon)
    gap_values = np.exp(diff_log[lo:] - a_win.log_abs)
    gap = Trajectory(lo, gap_values)

    blocks = dyadic_blocks(gap.start, gap.end)
    sups = [float(m) for m in block_maxima(gap.values, gap.start, blocks)] if blocks else []

    representation = verify_growth3(linear_kernel, H, scale, xi, x=x)
    return LinearisationReport(
        x=x, y=y, gap=gap, block_sups=sups,
        representation=representation,
        x_estimate=estimate_limsup(x, scale, **limsup),
        h_estimate=estimate_limsup(H.window(1, H.end), scale, **limsup),
        slope=f.slope_at_infinity,
    )
