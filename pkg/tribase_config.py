"""
Configuration for tribase
Environment-driven defaults plus the validated run and sweep configurations
"""
import os
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tribase_errors import UnsupportedDimension

load_dotenv()

# Configuration
MAX_RETRIES = int(os.getenv("TRIBASE_MAX_RETRIES", "3"))
TIE_TOL = float(os.getenv("TRIBASE_TIE_TOL", "1e-9"))
PROB_FLOOR = float(os.getenv("TRIBASE_PROB_FLOOR", "1e-12"))
MAX_ENUM_DIM = int(os.getenv("TRIBASE_MAX_ENUM_DIM", "24"))
EXACT_ZERO_EPS = float(os.getenv("TRIBASE_EXACT_ZERO_EPS", "1e-10"))
ZERO_COUNT_SCALE = float(os.getenv("TRIBASE_ZERO_COUNT_SCALE", "0.5"))
EXACT_EQUAL_TOL = float(os.getenv("TRIBASE_EXACT_EQUAL_TOL", "1e-9"))
REPORT_TOP = int(os.getenv("TRIBASE_REPORT_TOP", "16"))
API_KEY = os.getenv("TRIBASE_API_KEY", "your-secret-api-key-here")

# Numerical tolerances that are part of the method, not tunables
AMPLITUDE_ZERO = 1e-12
RADICAND_SLACK = 1e-9
ORTHO_TOL = 1e-10


def _check_dimension(d: int) -> int:
    """Raises UnsupportedDimension, which pydantic passes through to the caller unwrapped"""
    if d < 4 or d % 2:
        raise UnsupportedDimension(f"dimension must be even and >= 4, got {d}")
    return d


class RunConfig(BaseModel):
    """Validated options for a single CLI command"""
    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "reconstruct", "sweep", "oracle-check"]
    dimension: Optional[int] = None
    shots: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    method: Literal["3bb", "5bb"] = "3bb"
    a: Optional[float] = Field(default=None, gt=0, lt=1)
    b: Optional[float] = Field(default=None, gt=0, lt=1)
    phases: Optional[List[float]] = None
    state: str = "haar"
    input: Optional[str] = None
    output: Optional[str] = None
    counts_output: Optional[str] = None
    trials: int = Field(default=100, ge=1)
    retries: int = Field(default=MAX_RETRIES, ge=0)
    literal_scaling: bool = False

    @field_validator("dimension")
    @classmethod
    def _dimension_even(cls, v):
        return v if v is None else _check_dimension(v)

    @model_validator(mode="after")
    def _command_requirements(self):
        if self.command in ("simulate", "oracle-check") and self.dimension is None and self.state == "haar":
            raise ValueError(f"{self.command} needs --dim")
        if self.command == "simulate" and self.shots is None:
            raise ValueError("simulate needs --shots >= 1")
        if self.command in ("reconstruct", "sweep") and not self.input:
            raise ValueError(f"{self.command} needs --input")
        if self.command == "sweep" and not self.output:
            raise ValueError("sweep needs --output")
        if (self.a is None) != (self.b is None):
            raise ValueError("--a and --b must be given together")
        return self


class SweepConfig(BaseModel):
    """Accuracy-study configuration, read from a JSON file"""
    model_config = ConfigDict(extra="forbid")

    dimensions: List[int] = Field(min_length=1)
    shots_grid: List[int] = Field(min_length=1)
    states: int = Field(default=200, ge=1)
    trials: int = Field(default=20, ge=1)
    seed: int = 0
    method: Literal["3BB", "5BB"] = "3BB"
    retry: Literal["none", "retry"] = "none"
    workers: int = Field(default=1, ge=1)
    # None: 2/sqrt(N) per grid point
    sign_tol: Optional[float] = Field(default=None, ge=0)

    @field_validator("dimensions")
    @classmethod
    def _dimensions_even(cls, v):
        return [_check_dimension(d) for d in v]

    @field_validator("shots_grid")
    @classmethod
    def _shots_positive(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("every N in shots_grid must be >= 1")
        return v
