"""
End-to-end run of the three-stage game: the commission is bargained, the
firms compete in shares at that commission, and the users settle at the
resulting prices.
"""

import logging
from dataclasses import dataclass

from bargaining.nash import solve_bargaining
from benchmarks.schemes import pure_information_market
from benchmarks.welfare import BenchmarkReport, report_from_stage2
from dynamics.equilibrium import best_response_map, solve_equilibrium
from market.exceptions import DomainError, MarketError
from market.params import SCHEME_KINDS

logger = logging.getLogger(__name__)


@dataclass
class EquilibriumReport:
    scheme_kind: str
    outcome: BenchmarkReport
    bargaining: object
    stage3: object
    fixed_point_residual: float

    @property
    def agreed(self):
        return self.bargaining.feasible

    @property
    def shares(self):
        return self.outcome.shares

    @property
    def prices(self):
        return self.outcome.prices

    def as_row(self):
        row = self.outcome.as_row()
        row.update({
            'scheme': self.scheme_kind,
            'agreed': self.agreed,
            'nash_product': self.bargaining.nash_product,
            'fixed_point_residual': self.fixed_point_residual,
        })
        return row


def _labelled(stage, call, *args, **kwargs):
    try:
        return call(*args, **kwargs)
    except MarketError as exc:
        exc.add_note(f'while solving {stage}')
        raise


def run_three_stage(scheme_kind, params, grid_steps=None, pairing=None, workers=1, **stage2_options):
    """
    Bargained commission, Stage II shares and the Stage III check of those
    shares at the implied prices. A failed bargain falls back to the pure
    information market the database runs on its own.
    """
    if scheme_kind not in SCHEME_KINDS:
        raise DomainError(f'unknown scheme {scheme_kind!r}')
    bargaining = _labelled(
        'stage I (bargaining)', solve_bargaining, scheme_kind, params,
        grid_steps=grid_steps, pairing=pairing, workers=workers, **stage2_options,
    )
    if bargaining.feasible:
        outcome = report_from_stage2(scheme_kind, bargaining.stage2, params)
    else:
        logger.warning('%s bargaining failed; reporting the disagreement outcome', scheme_kind)
        outcome = pure_information_market(params)
        outcome.scheme_name = scheme_kind

    stage3 = _labelled('stage III (user dynamics)', solve_equilibrium, outcome.prices, params)
    residual = best_response_map(outcome.shares, outcome.prices, params).distance(outcome.shares)
    logger.info('%s three-stage equilibrium: commission %.6g shares (%.6f, %.6f) residual %.2e',
                scheme_kind, outcome.commission, outcome.shares.eta_l, outcome.shares.eta_a, residual)
    return EquilibriumReport(scheme_kind, outcome, bargaining, stage3, residual)
