import os
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, PositiveFloat, PositiveInt, ValidationError

from .exceptions import ConfigurationException

DEFAULT_TOLERANCE = 1e-10
DEFAULT_PINV_CUTOFF = 1e-12


class LatticeSettings(BaseModel):
    """
    Runtime settings shared by the CLI and the batch runner.

    Precedence is: explicit argument (CLI flag) > environment variable > default. Use
    `LatticeSettings.from_env()` to pick up the environment and `with_overrides()` to apply flags.

    Attributes:
        tolerance: Relative tolerance of the Schur-Cohn test (CP_LATTICE_TOL)
        pinv_cutoff: Relative eigenvalue cutoff of the PSD pseudo-inverse
        workers: Number of worker processes for batch evaluation (CP_LATTICE_WORKERS)
        trace_exporter: "console" exports OpenTelemetry spans to stderr (CP_LATTICE_TRACE)
    """

    tolerance: PositiveFloat = DEFAULT_TOLERANCE
    pinv_cutoff: PositiveFloat = DEFAULT_PINV_CUTOFF
    workers: PositiveInt = 1
    trace_exporter: Literal["none", "console"] = "none"

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_env(cls) -> "LatticeSettings":
        """
        Build settings from CP_LATTICE_* environment variables.

        Raises:
            ConfigurationException: If a variable is set but cannot be parsed
        """
        values = {}
        tolerance = os.getenv("CP_LATTICE_TOL")
        workers = os.getenv("CP_LATTICE_WORKERS")
        trace_exporter = os.getenv("CP_LATTICE_TRACE")
        if tolerance:
            values["tolerance"] = tolerance
        if workers:
            values["workers"] = workers
        if trace_exporter:
            values["trace_exporter"] = trace_exporter.lower()
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigurationException(f"Invalid CP_LATTICE_* environment configuration: {e}") from e

    def with_overrides(self, tolerance: Optional[float] = None, workers: Optional[int] = None) -> "LatticeSettings":
        updates = {}
        if tolerance is not None:
            updates["tolerance"] = tolerance
        if workers is not None:
            updates["workers"] = workers
        if not updates:
            return self
        try:
            return LatticeSettings(**{**self.model_dump(), **updates})
        except ValidationError as e:
            raise ConfigurationException(f"Invalid setting override: {e}") from e
