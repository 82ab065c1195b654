"""
Resource limits for universes and the operations that grow sets
"""

# Standard
import dataclasses
import os

# First Party
import alog

# Local
from .errors import ValidationError

log = alog.use_channel("CONFIG")

## Globals #####################################################################

# Environment variable for each Limits field
LIMIT_ENV_VARS = {
    "max_nodes": "HYDRA_MAX_NODES",
    "max_powerset_base": "HYDRA_MAX_POWERSET_BASE",
    "max_numeral": "HYDRA_MAX_NUMERAL",
    "max_exponential": "HYDRA_MAX_EXPONENTIAL",
}

## Interface ###################################################################


@dataclasses.dataclass(frozen=True)
class Limits:
    """Bounds that keep every operation finite and predictable.

    Exceeding any of these raises ResourceBoundError; results are never
    silently truncated.
    """

    # Largest graph (in nodes) that may be interned
    max_nodes: int = 10**6
    # Largest set whose powerset may be formed
    max_powerset_base: int = 20
    # Largest von Neumann numeral that may be built
    max_numeral: int = 4096
    # Largest number of functions an exponential may enumerate
    max_exponential: int = 2**16

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, int) or value < 0:
                raise ValidationError(
                    f"Limit {field.name} must be a non-negative integer, got {value!r}"
                )

    @classmethod
    def from_env(cls, **overrides) -> "Limits":
        """Build limits from the HYDRA_* environment variables

        Kwargs:
            **overrides:  int
                Explicit values which win over the environment

        Returns:
            limits:  Limits
                The resolved limits
        """
        kwargs = {}
        for field_name, env_var in LIMIT_ENV_VARS.items():
            raw = os.environ.get(env_var)
            if raw is None:
                continue
            try:
                kwargs[field_name] = int(raw)
            except ValueError as err:
                raise ValidationError(
                    f"Invalid integer for {env_var}: {raw!r}"
                ) from err
            log.debug2("Limit %s=%s from %s", field_name, raw, env_var)
        kwargs.update(
            {name: value for name, value in overrides.items() if value is not None}
        )
        return cls(**kwargs)
