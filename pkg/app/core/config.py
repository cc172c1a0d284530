from pydantic_settings import BaseSettings
from typing import Optional
from dotenv import load_dotenv
import math

# Explicitly load .env file
load_dotenv()

class Settings(BaseSettings):
    PROJECT_NAME: str = "Decoherent Cycle Walk"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    LOG_FILE: str = "qwalk.log"
    LOG_TO_FILE: bool = True

    # Experiment defaults
    DEFAULT_COIN_ANGLE: float = math.pi / 4  # Hadamard coin
    DEFAULT_RECORD_EVERY: int = 1
    DEFAULT_EPSILON: float = 1e-3
    DEFAULT_T_MAX: int = 1000
    DEFAULT_OUTPUT_PATH: Optional[str] = None

    # Sweep execution
    SWEEP_WORKERS: int = 4
    RANDOM_SEED: int = 20240101

    # Numerical tolerances
    DENSITY_TOL: float = 1e-12  # Hermiticity / unit trace
    PSD_TOL: float = 1e-10  # most negative eigenvalue tolerated
    ENTROPY_EIG_CUTOFF: float = 1e-14
    UNIT_EIGENVALUE_RADIUS: float = 1e-7
    UNITAL_TOL: float = 1e-12
    CONTRACTION_TOL: float = 1e-12

    class Config:
        env_file = ".env"
        extra = "ignore"

settings = Settings()
