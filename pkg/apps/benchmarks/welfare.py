from dataclasses import dataclass, field

from dynamics.surplus import consumer_surplus


@dataclass
class BenchmarkReport:
    scheme_name: str
    shares: object
    prices: object
    u_licensee: float
    u_database: float
    consumer_surplus: float
    commission: float = float('nan')
    energy_cost: float = float('nan')
    converged: bool = True
    details: dict = field(default_factory=dict)

    @property
    def network_profit(self):
        return self.u_licensee + self.u_database

    @property
    def social_welfare(self):
        return social_welfare(self)

    def as_row(self):
        row = {
            'scheme': self.scheme_name,
            'delta_or_w': self.commission,
            'eta_l': self.shares.eta_l,
            'eta_a': self.shares.eta_a,
            'p_l': self.prices.p_l,
            'p_a': self.prices.p_a,
            'u_sl': self.u_licensee,
            'u_db': self.u_database,
            'network_profit': self.network_profit,
            'consumer_surplus': self.consumer_surplus,
            'social_welfare': self.social_welfare,
            'energy_cost': self.energy_cost,
            'converged': self.converged,
        }
        row.update(self.details)
        return row


def social_welfare(report):
    """Firm payoffs plus consumer surplus; commissions cancel between the firms."""
    return report.u_licensee + report.u_database + report.consumer_surplus


def report_from_stage2(name, stage2, params):
    """Benchmark view of a Stage II equilibrium."""
    return BenchmarkReport(
        scheme_name=name,
        shares=stage2.shares,
        prices=stage2.prices,
        u_licensee=stage2.payoffs.u_licensee,
        u_database=stage2.payoffs.u_database,
        consumer_surplus=consumer_surplus(stage2.shares, stage2.prices, params),
        commission=stage2.scheme.value,
        energy_cost=stage2.shares.eta_a * params.cost_advanced,
        converged=stage2.converged,
        details={
            'bounds_hold': stage2.bounds_hold,
            'dominant_diagonal': stage2.dominant_diagonal_holds,
        },
    )


def energy_cost_comparison(integrated, sensing, params, sensing_params):
    """
    Energy spent on channel information: the database serving advanced users
    against users sensing for themselves.
    """
    e_integrated = integrated.shares.eta_a * params.cost_advanced
    e_sensing = sensing.details['eta_s'] * sensing_params.c_s
    return e_integrated, e_sensing
