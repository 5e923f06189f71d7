"""
Application configuration management with pydantic-settings.
"""

from typing import List, Optional
from functools import lru_cache
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class RegistrySettings(BaseSettings):
    """Hadamard order registry settings."""

    model_config = SettingsConfigDict(env_prefix="RECOUPLER_REGISTRY_", case_sensitive=False)

    bound: int = 20000
    extra_files: List[str] = []

    @field_validator("bound")
    @classmethod
    def validate_bound(cls, v: int) -> int:
        """Sylvester powers of two must reach past the largest queried n."""
        if v < 2:
            raise ValueError(f"Registry bound must be at least 2, got {v}")
        return v


class SimulationSettings(BaseSettings):
    """Brute-force oracle settings."""

    model_config = SettingsConfigDict(env_prefix="RECOUPLER_SIMULATION_", case_sensitive=False)

    max_spins: int = 20
    dense_max_spins: int = 3
    phase_tolerance: float = 1e-10
    heteronuclear_ratio: float = 100.0
    n_jobs: int = 1


class CompileSettings(BaseSettings):
    """Pulse program compilation settings."""

    model_config = SettingsConfigDict(env_prefix="RECOUPLER_COMPILE_", case_sensitive=False)

    default_duration_s: float = 1e-3
    # parallel recoupled pairs must share one coupling within this relative tolerance
    parallel_coupling_rtol: float = 1e-9


class AnalysisSettings(BaseSettings):
    """Prime sieve and order-statistics settings."""

    model_config = SettingsConfigDict(env_prefix="RECOUPLER_ANALYSIS_", case_sensitive=False)

    sieve_bound: int = 10_000_000

    # Published figures for known Hadamard orders, reported next to ours
    literature_max_gap_1000: int = 8
    literature_max_gap_10000: int = 32


class LoggingSettings(BaseSettings):
    """Logging configuration settings."""

    model_config = SettingsConfigDict(env_prefix="RECOUPLER_LOG_", case_sensitive=False)

    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None
    structured: bool = False


class Settings(BaseSettings):
    """Main settings combining all configurations."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="RECOUPLER_",
        case_sensitive=False,
        extra="ignore",
    )

    registry: RegistrySettings = RegistrySettings()
    simulation: SimulationSettings = SimulationSettings()
    compile: CompileSettings = CompileSettings()
    analysis: AnalysisSettings = AnalysisSettings()
    logging: LoggingSettings = LoggingSettings()

    environment: str = "development"

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        """Validate environment value."""
        valid_envs = ["development", "testing", "production"]
        if v not in valid_envs:
            raise ValueError(f"Invalid environment: {v}. Must be one of: {valid_envs}")
        return v


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings(
        registry=RegistrySettings(),
        simulation=SimulationSettings(),
        compile=CompileSettings(),
        analysis=AnalysisSettings(),
        logging=LoggingSettings(),
    )


def is_production() -> bool:
    """Check if running in production environment."""
    return get_settings().environment == "production"
