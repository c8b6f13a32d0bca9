from market.exceptions import MarketError


class AgentCycleError(MarketError):
    """The discrete user population keeps alternating between states."""

    def __init__(self, message, states):
        self.states = states
        super().__init__(message)


class OracleCandidateError(MarketError):
    """The brute-force equilibrium search found no point or several separate ones."""

    def __init__(self, message, candidates):
        self.candidates = candidates
        super().__init__(message)
