"""
Monotonicity and curvature checks on sampled curves, tolerant to Monte Carlo
noise: a violation has to exceed three combined standard errors.
"""

from dataclasses import dataclass, field

import numpy as np

from market.exceptions import DomainError

NOISE_MULTIPLE = 3.0
ABSOLUTE_SLACK = 1e-12


@dataclass
class ShapeReport:
    direction: str
    curvature: str
    points: int
    monotone_violations: list = field(default_factory=list)
    curvature_violations: list = field(default_factory=list)

    @property
    def holds(self):
        return not (self.monotone_violations or self.curvature_violations)

    def __bool__(self):
        return self.holds


def shape_checks(shares, values, stderr=None, increasing=False, convex=True):
    """
    Check a curve for the expected direction and curvature; pass None to
    skip either.

    Slopes and slope changes use divided differences, so the share grid may
    be uneven. Standard errors of neighbouring samples are treated as
    independent.
    """
    x = np.asarray(shares, dtype=float)
    y = np.asarray(values, dtype=float)
    se = np.zeros_like(y) if stderr is None else np.asarray(stderr, dtype=float)
    if x.size < 5 or y.shape != x.shape or se.shape != x.shape:
        raise DomainError('shape checks need at least five points with matching values and errors')
    if np.any(np.diff(x) <= 0):
        raise DomainError('shares must be strictly increasing')

    dx = np.diff(x)
    slope = np.diff(y) / dx
    slope_se = np.sqrt(se[:-1] ** 2 + se[1:] ** 2) / dx
    monotone = []
    if increasing is not None:
        slack = NOISE_MULTIPLE * slope_se + ABSOLUTE_SLACK
        wrong_way = -slope if increasing else slope
        monotone = [int(i) for i in np.flatnonzero(wrong_way > slack)]

    curvature = []
    if convex is not None:
        bend = np.diff(slope)
        bend_se = np.sqrt(slope_se[:-1] ** 2 + slope_se[1:] ** 2)
        bend_slack = NOISE_MULTIPLE * bend_se + ABSOLUTE_SLACK * (1.0 + np.abs(slope[:-1]))
        wrong_bend = -bend if convex else bend
        curvature = [int(i) + 1 for i in np.flatnonzero(wrong_bend > bend_slack)]

    return ShapeReport(
        direction={True: 'non-decreasing', False: 'non-increasing', None: 'unchecked'}[increasing],
        curvature={True: 'convex', False: 'concave', None: 'unchecked'}[convex],
        points=int(x.size),
        monotone_violations=monotone,
        curvature_violations=curvature,
    )
