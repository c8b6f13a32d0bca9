"""
Qualitative properties the sweeps are expected to show, checked on the
sweep frames.
"""

from dataclasses import dataclass

import numpy as np

GAP_LIMIT = 0.15
WPS_GAIN_RANGE = (0.6, 1.1)
CROSSOVER_RANGE = (0.0, 0.08)
LAMBDA_SCHEMES = ('rss', 'wps', 'coordination', 'third_party', 'pure_info')


@dataclass
class Finding:
    name: str
    holds: bool
    detail: str = ''
    value: float = float('nan')

    def as_row(self):
        return {'check': self.name, 'passed': self.holds, 'value': self.value, 'detail': self.detail}


def _column(frame, scheme, column):
    rows = frame[(frame['scheme'] == scheme) & (frame['error'].fillna('') == '')]
    return rows['value'].to_numpy(float), rows[column].to_numpy(float)


def _aligned(frame, schemes, column):
    """Values of `column` per scheme, restricted to grid values every scheme solved."""
    series = {scheme: dict(zip(*_column(frame, scheme, column))) for scheme in schemes}
    common = sorted(set.intersection(*(set(values) for values in series.values())))
    return np.array(common), {scheme: np.array([series[scheme][v] for v in common]) for scheme in schemes}


def monotone_trend(frame, scheme, column, increasing, allowed=1, magnitude=1e-4):
    """At most `allowed` steps against the trend, none larger than `magnitude`."""
    _, values = _column(frame, scheme, column)
    steps = np.diff(values)
    against = -steps if increasing else steps
    bad = against[against > 0]
    holds = bad.size <= allowed and bool(np.all(bad <= magnitude))
    trend = 'non-decreasing' if increasing else 'non-increasing'
    largest = float(bad.max()) if bad.size else 0.0
    return Finding(f'{scheme} {column} {trend}', holds, f'{bad.size} violations, largest {largest:.3g}', largest)


def profit_ordering(frame, slack=1e-6):
    """coordination >= best bargained scheme >= third party >= pure information, point by point."""
    ladder = ('coordination', 'best_bargained', 'third_party', 'pure_info')
    _, profits = _aligned(frame, ('coordination', 'rss', 'wps', 'third_party', 'pure_info'), 'network_profit')
    profits['best_bargained'] = np.maximum(profits['rss'], profits['wps'])
    failures = [
        f'{upper} < {lower}'
        for upper, lower in zip(ladder, ladder[1:])
        if np.any(profits[upper] < profits[lower] - slack)
    ]
    return Finding('network profit ordering', not failures, '; '.join(failures))


def coordination_gap(frame):
    """Largest relative shortfall of the better bargained scheme against coordination."""
    _, profits = _aligned(frame, ('coordination', 'rss', 'wps'), 'network_profit')
    gap = 1.0 - np.maximum(profits['rss'], profits['wps']) / profits['coordination']
    return float(np.max(gap))


def wps_gain(frame):
    """
    Largest share of the WPS network profit that the pure information market
    does not reach, (WPS - pure) / WPS.
    """
    _, profits = _aligned(frame, ('wps', 'pure_info'), 'network_profit')
    return float(np.max((profits['wps'] - profits['pure_info']) / profits['wps']))


def scheme_preference(frame):
    """
    The database prefers RSS at the lowest swept lambda and WPS at the highest;
    the licensee prefers WPS at both ends.
    """
    values, database = _aligned(frame, ('rss', 'wps'), 'u_db')
    _, licensee = _aligned(frame, ('rss', 'wps'), 'u_sl')
    low, high = 0, values.size - 1
    conditions = {
        f'database rss > wps at {values[low]:g}': database['rss'][low] > database['wps'][low],
        f'database wps > rss at {values[high]:g}': database['wps'][high] > database['rss'][high],
        f'licensee wps > rss at {values[low]:g}': licensee['wps'][low] > licensee['rss'][low],
        f'licensee wps > rss at {values[high]:g}': licensee['wps'][high] > licensee['rss'][high],
    }
    failures = [name for name, holds in conditions.items() if not holds]
    detail = (f'u_db rss/wps {database["rss"][low]:.4f}/{database["wps"][low]:.4f} -> '
              f'{database["rss"][high]:.4f}/{database["wps"][high]:.4f}; failing: {", ".join(failures) or "none"}')
    return Finding('scheme preference crossover', not failures, detail)


def share_bounds(frame):
    """Bargained equilibria keep eta_l in (0, 1/2) and eta_l + eta_a < 1."""
    rows = frame[frame['scheme'].isin(('rss', 'wps')) & (frame['error'].fillna('') == '')]
    rows = rows[rows['agreed'].astype(bool)]
    violations = int(np.count_nonzero(~rows['bounds_hold'].astype(bool)))
    return Finding('equilibrium share bounds', violations == 0, f'{violations} violations', violations)


def welfare_ranking(frame, better='rss', worse='wps', slack=1e-6):
    _, welfare = _aligned(frame, (better, worse), 'social_welfare')
    shortfall = welfare[worse] - welfare[better]
    largest = float(np.max(shortfall))
    return Finding(f'{better} social welfare >= {worse}', bool(np.all(shortfall <= slack)),
                   f'largest shortfall {largest:.3g}', largest)


def energy_crossover(frame, integrated='rss'):
    """
    First swept sensing cost at which users sensing for themselves spend at
    least as much energy as the database serving advanced users; None if never.
    """
    values, energy = _aligned(frame, ('sensing', integrated), 'energy_cost')
    above = np.flatnonzero(energy['sensing'] >= energy[integrated])
    return float(values[above[0]]) if above.size else None


def sensing_welfare(frame, integrated='rss', slack=1e-6):
    """The integrated market's social welfare is at least the sensing market's at every sensing cost."""
    return welfare_ranking(frame, better=integrated, worse='sensing', slack=slack)


def lambda_findings(frame):
    schemes = set(frame['scheme'])
    findings = []
    for scheme in sorted(schemes & {'rss', 'wps'}):
        findings.append(monotone_trend(frame, scheme, 'u_db', increasing=True))
        findings.append(monotone_trend(frame, scheme, 'u_sl', increasing=False))
    if {'rss', 'wps'} <= schemes:
        findings.append(scheme_preference(frame))
    findings.append(share_bounds(frame))
    if set(LAMBDA_SCHEMES) <= schemes:
        findings.append(profit_ordering(frame))
        gap = coordination_gap(frame)
        findings.append(Finding('coordination gap', gap <= GAP_LIMIT, f'{gap:.3f} <= {GAP_LIMIT}', gap))
        gain = wps_gain(frame)
        low, high = WPS_GAIN_RANGE
        findings.append(Finding('wps gain over pure information', low <= gain <= high,
                                f'{gain:.3f} in [{low}, {high}]', gain))
    return findings


def cost_leasing_findings(frame):
    schemes = set(frame['scheme'])
    findings = [
        monotone_trend(frame, scheme, column, increasing=False)
        for scheme in sorted(schemes & {'rss', 'wps'}) for column in ('u_db', 'u_sl')
    ]
    findings.append(share_bounds(frame))
    if {'rss', 'wps'} <= schemes:
        findings.append(welfare_ranking(frame))
    return findings


def cost_sensing_findings(frame, integrated='rss'):
    crossover = energy_crossover(frame, integrated)
    low, high = CROSSOVER_RANGE
    return [
        Finding('energy crossover', crossover is not None and low <= crossover <= high,
                f'c_s = {crossover} in [{low}, {high}]', float('nan') if crossover is None else crossover),
        sensing_welfare(frame, integrated),
    ]
