"""Python access to the blowup lab core."""

from ._core import (
    ConfigError,
    LabError,
    PoleError,
    __version__,
    describe_schema,
    hyp2f1,
    mode_indicator,
    multiplicity_solution,
    phi0_closed,
    phi0_series,
    rgamma,
    run,
    subcommands,
)

__all__ = [
    "ConfigError",
    "LabError",
    "PoleError",
    "__version__",
    "describe_schema",
    "hyp2f1",
    "mode_indicator",
    "multiplicity_solution",
    "phi0_closed",
    "phi0_series",
    "rgamma",
    "run",
    "subcommands",
]
