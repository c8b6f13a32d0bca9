"""
Discrete counterpart of the Stage III dynamics: n users with types on a
midpoint grid re-choose their service every round from the empirical shares
of the previous round.
"""

import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from dynamics.exceptions import ConvergenceError
from market.exceptions import DomainError
from market.params import MarketShare, ServiceChoice
from market.utility import service_utilities

from .exceptions import AgentCycleError

logger = logging.getLogger(__name__)


@dataclass
class AgentPopulation:
    n: int
    thetas: np.ndarray
    choices: np.ndarray
    services: tuple
    rounds: int = 0

    def count(self, service):
        return int(np.count_nonzero(self.choices == self.services.index(service)))

    @property
    def shares(self):
        return MarketShare.clipped(
            self.count(ServiceChoice.LEASING) / self.n,
            self.count(ServiceChoice.ADVANCED) / self.n,
        )


def _services_by_price(prices):
    # A stable sort keeps basic first; argmax then breaks ties toward the cheaper service.
    catalogue = [
        (0.0, ServiceChoice.BASIC),
        (prices.p_a, ServiceChoice.ADVANCED),
        (prices.p_l, ServiceChoice.LEASING),
    ]
    return tuple(service for _, service in sorted(catalogue, key=lambda item: item[0]))


def simulate_agents(n, prices, params, max_rounds=None, init=None):
    if n < 100:
        raise DomainError(f'agent population needs at least 100 users, got {n}')
    max_rounds = settings.TVWS['AGENT_MAX_ROUNDS'] if max_rounds is None else max_rounds
    services = _services_by_price(prices)
    thetas = (np.arange(n) + 0.5) / n
    population = AgentPopulation(n, thetas, np.full(n, -1, dtype=np.int8), services)
    shares = init or MarketShare(0.0, 0.0)
    history = []

    for round_number in range(1, max_rounds + 1):
        utilities = service_utilities(shares, params)
        value = {
            ServiceChoice.BASIC: thetas * utilities.r_basic,
            ServiceChoice.ADVANCED: thetas * utilities.r_advanced - prices.p_a,
            ServiceChoice.LEASING: thetas * params.q_leasing - prices.p_l,
        }
        payoffs = np.column_stack([value[service] for service in services])
        choices = np.argmax(payoffs, axis=1).astype(np.int8)
        population.rounds = round_number

        if np.array_equal(choices, population.choices):
            logger.info('%d agents settled after %d rounds at %s', n, round_number, population.shares)
            return population
        if len(history) >= 2 and np.array_equal(choices, history[-2]):
            states = (population.shares, _shares_of(choices, services, n))
            if states[0].distance(states[1]) <= 2.0 / n:
                logger.debug('agents alternate between neighbouring states %s', states)
                population.choices = choices
                return population
            raise AgentCycleError(f'agent choices cycle after {round_number} rounds', states)

        history = (history + [choices])[-2:]
        population.choices = choices
        shares = population.shares

    raise ConvergenceError(f'agents did not settle within {max_rounds} rounds', last=population.shares,
                           rounds=max_rounds)


def _shares_of(choices, services, n):
    leasing = np.count_nonzero(choices == services.index(ServiceChoice.LEASING))
    advanced = np.count_nonzero(choices == services.index(ServiceChoice.ADVANCED))
    return MarketShare.clipped(leasing / n, advanced / n)


def agent_based_equilibrium(n, prices, params, max_rounds=None):
    return simulate_agents(n, prices, params, max_rounds).shares
