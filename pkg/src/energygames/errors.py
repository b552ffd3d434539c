"""Exception types shared across the package."""


class IllPosedError(ValueError):
    """A constant or subgame is undefined for the requested parameters."""


class InfeasibleError(ValueError):
    """No non-saturated equilibrium exists in the requested regime."""
